from .core import (
    DiscretenessError,
    NotPrimitiveError,
    gauss_bound_holds,
    gauss_reduce,
    handle_euclid,
    move,
    orbit_map,
    primitive_to_basis,
)
from .lattice_form import (
    GENERIC_FORM,
    GENUS2_FORM,
    LATTICE_FORM,
    NormalFormResult,
    PreconditionError,
    lattice_normal_form,
    standardizing_map,
)
from .genus2 import (
    dense_interval_hit,
    genus2_normalize,
    halve_handle,
    is_dense_pair,
    resolve_zero_det,
)
from .generic import generic_form_check, generic_normalize_heuristic, same_direction
