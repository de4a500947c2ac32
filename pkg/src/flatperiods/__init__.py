"""Exact computations with periods of translation surfaces in prescribed strata."""
from .field import FieldContext, PlanePoint, QuadElem, det2, dot, norm_sq, qsign, sqrt
from .matrices import GLPlus, SpMatrix
from .chi import (
    NotRealizable,
    Partition,
    PeriodVector,
    Realizable,
    all_partitions,
    apply_gl,
    apply_sp,
    cover_data,
    decide,
    haupt_decide,
    image_group,
    volume,
)
from .surface import MarkedCurve, TranslationSurface, stratum, verify_certificate
from .builder import HeuristicExhausted, RealizationCertificate, SlitDiagram, realize
