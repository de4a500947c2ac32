"""Normal form of characters whose image is a lattice."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..chi import PeriodVector, apply_gl, apply_sp, image_group, volume
from ..field import PlanePoint, QuadElem, format_quad, qsign
from ..intlattice import content, xgcd
from ..matrices import GLPlus, SpMatrix
from .core import handle_euclid, move, primitive_to_basis

LATTICE_FORM = "lattice_form"
GENERIC_FORM = "generic_form"
GENUS2_FORM = "genus2_form"


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class NormalFormResult:
    A: GLPlus
    gamma: SpMatrix
    chi_prime: PeriodVector
    form_tag: str

    def recomputes(self, chi: PeriodVector) -> bool:
        return apply_gl(self.A, apply_sp(self.gamma, chi)) == self.chi_prime

    def to_text(self) -> str:
        return (
            f"tag {self.form_tag}\n"
            f"A\n{self.A.to_text()}"
            f"gamma\n{self.gamma.to_text()}"
            f"chi\n{self.chi_prime.to_text()}"
        )

    @classmethod
    def from_text(cls, text: str) -> "NormalFormResult":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        tag = lines[0].split()[1]
        ia, ig, ic = lines.index("A"), lines.index("gamma"), lines.index("chi")
        A = GLPlus.from_text("\n".join(lines[ia + 1:ig]))
        gamma = SpMatrix.from_text("\n".join(lines[ig + 1:ic]))
        chi = PeriodVector.from_text("\n".join(lines[ic + 1:]))
        return cls(A, gamma, chi, tag)


class _Pipeline:
    """Accumulates symplectic moves applied to a character."""

    def __init__(self, chi: PeriodVector):
        self.chi = chi
        self.gamma = SpMatrix.identity(chi.genus)

    def apply(self, M: SpMatrix):
        self.chi = apply_sp(M, self.chi)
        self.gamma = M @ self.gamma

    def euclid(self, i, coordinate, zero="b", positive=True):
        M, _ = handle_euclid(self.chi, i, coordinate, zero=zero, positive=positive)
        self.apply(M)


def _as_int(x: QuadElem) -> int:
    if not x.is_integer():
        raise AssertionError(f"expected an integer, got {x}")
    return int(x.p)


def standardizing_map(chi: PeriodVector) -> GLPlus:
    """GL2+ map sending the image lattice of ``chi`` onto Z + iZ."""
    img = image_group(chi)
    if not img.is_lattice:
        raise PreconditionError(f"image is {img.classification}, not a lattice")
    v1, v2 = img.lattice_basis
    # keep the identity when the image already is Z + iZ
    if img.covolume == 1 and all(
        z.re.is_integer() and z.im.is_integer() for z in chi.entries
    ):
        return GLPlus.identity()
    return GLPlus.from_columns(v1, v2).inverse()


def _m_vector(g: int, m) -> list[int]:
    if m is None:
        return [1] * (g - 2)
    m = [int(x) for x in m]
    if len(m) == g - 1:
        if m[0] != 1:
            raise PreconditionError("m_2 must be 1")
        m = m[1:]
    if len(m) != g - 2 or any(x not in (1, 2) for x in m):
        raise PreconditionError(f"m must list m_3..m_g (or m_2..m_g) with values in {{1, 2}}, got {m}")
    return m


def lattice_normal_form(chi: PeriodVector, m=None) -> NormalFormResult:
    """Bring a lattice character to ``(p, i, 1, 0, m_3, 0, ..., m_g, 0)``.

    ``p`` is volume / covolume.  The returned ``A`` and ``gamma`` satisfy
    ``chi' = A . (gamma . chi)``.
    """
    g = chi.genus
    mv = _m_vector(g, m)
    img = image_group(chi)
    if not img.is_lattice:
        raise PreconditionError(f"image is {img.classification}, not a lattice")
    vol = volume(chi)
    if vol < img.covolume * 2:
        raise PreconditionError(f"volume {vol} < 2 * covolume {img.covolume}")

    A = standardizing_map(chi)
    pipe = _Pipeline(apply_gl(A, chi))

    # imaginary parts -> (0, 1, 0, ..., 0)
    v = [_as_int(z.im) for z in pipe.chi]
    rot = move(g, a1={"b1": -1}, b1={"a1": 1})
    pipe.apply(rot @ primitive_to_basis(v))

    # real parts on handles 2..g -> (0, l, 0, ..., 0)
    if g >= 2:
        w = [_as_int(z.re) for z in pipe.chi.entries[2:]]
        c = content(w)
        if c:
            C = primitive_to_basis([x // c for x in w])
            sub = SpMatrix.identity(g).m
            sub[2:, 2:] = C.m
            pipe.apply(SpMatrix(sub))
            pipe.apply(move(g, a2={"b2": -1}, b2={"a2": 1}))

        p = _as_int(pipe.chi.a(1).re)
        q = _as_int(pipe.chi.b(1).re)
        l = _as_int(pipe.chi.b(2).re)
        gg, s, t = xgcd(p, l)
        if gg != 1:
            raise AssertionError("image is not Z + iZ after standardization")
        lam, mu = -q * s, -q * t
        # (a1, b1 + mu b2, a2 - mu a1, b2), then (a1, b1 + lam a1)
        pipe.apply(move(g, b1={"b1": 1, "b2": mu}, a2={"a2": 1, "a1": -mu}))
        pipe.apply(move(g, b1={"b1": 1, "a1": lam}))
        assert pipe.chi.b(1) == PlanePoint(0, 1)

        pipe.euclid(2, "re", zero="a")
        # (a1, b1 - b2, a2 + a1, b2)
        pipe.apply(move(g, b1={"b1": 1, "b2": -1}, a2={"a2": 1, "a1": 1}))
        pipe.euclid(2, "re", zero="a", positive=True)
        assert pipe.chi.b(2) == PlanePoint(1, 0), pipe.chi.b(2)
        k = -_as_int(pipe.chi.b(1).re)
        # (a1, b1 + k b2, a2 - k a1, b2)
        pipe.apply(move(g, b1={"b1": 1, "b2": k}, a2={"a2": 1, "a1": -k}))
        kp = _as_int(-pipe.chi.a(2).re)
        # (a2, b2) -> (b2, -a2 - kp b2)
        pipe.apply(move(g, a2={"b2": 1}, b2={"a2": -1, "b2": -kp}))
        for i, mi in enumerate(mv, start=3):
            pipe.apply(move(g, b2={"b2": 1, f"b{i}": -mi}, **{f"a{i}": {f"a{i}": 1, "a2": mi}}))

    out = NormalFormResult(A, pipe.gamma, pipe.chi, LATTICE_FORM)
    expected = [PlanePoint(pipe.chi.a(1).re, 0), PlanePoint(0, 1)]
    if g >= 2:
        expected += [PlanePoint(1, 0), PlanePoint(0, 0)]
        for mi in mv:
            expected += [PlanePoint(mi, 0), PlanePoint(0, 0)]
    if list(pipe.chi.entries) != expected:
        raise AssertionError(f"lattice normal form failed: {pipe.chi.entries}")
    if qsign(pipe.chi.a(1).re) <= 0:
        raise AssertionError("non-positive p in lattice normal form")
    return out
