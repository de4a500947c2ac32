"""Period characters, their volume, and the subgroup they generate in the plane."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .field import PlanePoint, QuadElem, det2, format_point, parse_point, qsign, _join
from .intlattice import zbasis
from .matrices import GLPlus, SpMatrix


@dataclass(frozen=True)
class PeriodVector:
    """Values of a character on a standard symplectic basis (a1, b1, ..., ag, bg)."""

    genus: int
    entries: tuple

    def __post_init__(self):
        ents = tuple(PlanePoint.coerce(z) for z in self.entries)
        object.__setattr__(self, "entries", ents)
        if self.genus < 1:
            raise ValueError("genus must be positive")
        if len(ents) != 2 * self.genus:
            raise ValueError(f"expected {2 * self.genus} entries, got {len(ents)}")
        self.d  # raises on mixed fields

    @classmethod
    def of(cls, *entries) -> "PeriodVector":
        if len(entries) % 2:
            raise ValueError("odd number of entries")
        return cls(len(entries) // 2, tuple(entries))

    @property
    def d(self) -> int:
        d = 1
        for z in self.entries:
            d = _join(_join(d, z.re.d), z.im.d)
        return d

    def a(self, i: int) -> PlanePoint:
        """Period of a_i (1-based)."""
        return self.entries[2 * (i - 1)]

    def b(self, i: int) -> PlanePoint:
        return self.entries[2 * (i - 1) + 1]

    def handle_det(self, i: int) -> QuadElem:
        return det2(self.a(i), self.b(i))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def replace(self, updates: dict) -> "PeriodVector":
        ents = list(self.entries)
        for k, v in updates.items():
            ents[k] = PlanePoint.coerce(v)
        return PeriodVector(self.genus, tuple(ents))

    def to_text(self) -> str:
        return f"genus {self.genus}\n" + "".join(format_point(z) + "\n" for z in self.entries)

    @classmethod
    def from_text(cls, text: str) -> "PeriodVector":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) != 2 or head[0] != "genus":
            raise ValueError("period vector text must start with 'genus <g>'")
        g = int(head[1])
        pts = [parse_point(ln) for ln in lines[1:]]
        return cls(g, tuple(pts))


@dataclass(frozen=True)
class Partition:
    """Zero orders n1 <= ... <= nk of a stratum H(n1, ..., nk) in genus g."""

    parts: tuple
    genus: int

    def __post_init__(self):
        parts = tuple(sorted(int(n) for n in self.parts))
        object.__setattr__(self, "parts", parts)
        if any(n < 1 for n in parts):
            raise ValueError("partition parts must be >= 1")
        if sum(parts) != 2 * self.genus - 2:
            raise ValueError(f"parts {parts} do not sum to 2g-2 = {2 * self.genus - 2}")

    @classmethod
    def of(cls, *parts) -> "Partition":
        return cls(tuple(parts), (sum(parts) + 2) // 2)

    @property
    def top(self) -> int:
        return self.parts[-1] if self.parts else 0

    def __len__(self):
        return len(self.parts)

    def __str__(self):
        return ",".join(map(str, self.parts))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        parts = [int(t) for t in text.replace("(", "").replace(")", "").split(",") if t.strip()]
        if sum(parts) % 2:
            raise ValueError(f"partition {text!r} has odd sum")
        return cls.of(*parts)


def all_partitions(g: int) -> list[Partition]:
    """Every partition of 2g-2 into positive parts."""
    total = 2 * g - 2
    out = []

    def rec(rem, maxpart, acc):
        if rem == 0:
            out.append(Partition(tuple(acc), g))
            return
        for n in range(min(rem, maxpart), 0, -1):
            rec(rem - n, n, acc + [n])

    rec(total, total, [])
    return out


TRIVIAL = "trivial"
LINE_DISCRETE = "line_discrete"
LINE_DENSE = "line_dense"
LATTICE = "lattice"
PLANE_NONDISCRETE = "plane_nondiscrete"


@dataclass(frozen=True)
class ImageGroupReport:
    rank: int
    classification: str
    lattice_basis: Optional[tuple] = None
    covolume: Optional[QuadElem] = None

    @property
    def is_lattice(self) -> bool:
        return self.classification == LATTICE


def volume(chi: PeriodVector) -> QuadElem:
    """Sum of det(chi(a_i), chi(b_i)) over the handles."""
    total = QuadElem(0)
    for i in range(1, chi.genus + 1):
        total = total + chi.handle_det(i)
    return total


def coords(z: PlanePoint) -> list[Fraction]:
    """Rational coordinates of ``z`` over the basis {1, sqrt d} x {1, i}."""
    return [z.re.p, z.re.q, z.im.p, z.im.q]


def from_coords(c: Sequence[Fraction], d: int) -> PlanePoint:
    return PlanePoint(QuadElem(c[0], c[1], d), QuadElem(c[2], c[3], d))


def image_group(chi: PeriodVector) -> ImageGroupReport:
    """Classify the subgroup of the plane generated by the entries of ``chi``."""
    from .sp_action import gauss_reduce

    d = chi.d
    basis = zbasis([coords(z) for z in chi.entries])
    r = len(basis)
    if r == 0:
        return ImageGroupReport(0, TRIVIAL)
    gens = [from_coords(c, d) for c in basis]
    w = gens[0]
    if all(qsign(det2(w, z)) == 0 for z in gens[1:]):
        # generators are real multiples of w; that map is injective on the group
        return ImageGroupReport(r, LINE_DISCRETE if r == 1 else LINE_DENSE)
    if r == 2:
        _, v1, v2 = gauss_reduce(gens[0], gens[1])
        if qsign(det2(v1, v2)) < 0:
            v2 = -v2
        return ImageGroupReport(2, LATTICE, (v1, v2), det2(v1, v2))
    return ImageGroupReport(r, PLANE_NONDISCRETE)


def apply_sp(M: SpMatrix, chi: PeriodVector) -> PeriodVector:
    """Change of symplectic basis: new entry j is sum_k M[j, k] * chi[k]."""
    if M.g != chi.genus:
        raise ValueError(f"dimension mismatch: matrix genus {M.g}, character genus {chi.genus}")
    out = []
    for row in M.m:
        acc = PlanePoint(0, 0)
        for coef, z in zip(row, chi.entries):
            if coef:
                acc = acc + z * int(coef)
        out.append(acc)
    return PeriodVector(chi.genus, tuple(out))


def apply_gl(A: GLPlus, chi: PeriodVector) -> PeriodVector:
    if qsign(A.det()) <= 0:
        raise ValueError("GL2+ action requires positive determinant")
    return PeriodVector(chi.genus, tuple(A(z) for z in chi.entries))


# -- realizability decision -----------------------------------------------------

@dataclass(frozen=True)
class Realizable:
    volume: QuadElem
    image: ImageGroupReport

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotRealizable:
    reason: str
    volume: QuadElem
    image: ImageGroupReport
    deficit: Optional[QuadElem] = None

    def __bool__(self):
        return False


NONPOSITIVE_VOLUME = "nonpositive_volume"
LATTICE_BOUND = "lattice_bound"


def _decide_with_bound(chi: PeriodVector, factor: int):
    vol = volume(chi)
    img = image_group(chi)
    if qsign(vol) <= 0:
        return NotRealizable(NONPOSITIVE_VOLUME, vol, img)
    if img.is_lattice:
        need = img.covolume * factor
        if vol < need:
            return NotRealizable(LATTICE_BOUND, vol, img, deficit=need - vol)
    return Realizable(vol, img)


def decide(chi: PeriodVector, part: Partition):
    """Is ``chi`` the period of a differential in the stratum ``part``?"""
    if part.genus != chi.genus:
        raise ValueError(f"partition genus {part.genus} != character genus {chi.genus}")
    return _decide_with_bound(chi, part.top + 1)


def haupt_decide(chi: PeriodVector):
    """Same question with no constraint on the zeros."""
    return _decide_with_bound(chi, 2)


@dataclass(frozen=True)
class CoverData:
    degree: int
    branch_orders: Partition
    sublattice: ImageGroupReport


class CorruptCertificateError(ValueError):
    pass


def cover_data(cert) -> CoverData:
    """Degree and branching of the torus cover induced by a lattice certificate."""
    img = image_group(cert.chi_original)
    if not img.is_lattice:
        raise ValueError("cover data needs a lattice image")
    ratio = volume(cert.chi_original) / img.covolume
    if not ratio.is_integer():
        raise CorruptCertificateError(f"volume/covolume = {ratio} is not an integer")
    deg = int(ratio.p)
    if deg < cert.partition.top + 1:
        raise CorruptCertificateError(f"degree {deg} < n_k + 1 = {cert.partition.top + 1}")
    return CoverData(deg, cert.partition, img)
