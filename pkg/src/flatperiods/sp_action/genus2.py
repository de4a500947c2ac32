"""Genus-2 reduction for characters with non-discrete image.

Target: ``0 < det(a2, b2)`` and ``2 det(a2, b2) <= det(a1, b1)``, with
``(a1, b1) = (1, i)`` and ``a2`` Gauss-reduced so that ``|a2| < 1``.
The ratio 1/2 stands in for sqrt(3)/2 so all control flow stays rational.
"""
from __future__ import annotations

from ..chi import PeriodVector, apply_gl, apply_sp, image_group, volume
from ..field import I, PlanePoint, QuadElem, qsign
from ..intlattice import xgcd
from ..matrices import GLPlus, SpMatrix, handle_map, swap_handles
from .core import DiscretenessError, gauss_reduce, handle_euclid, move
from .lattice_form import GENUS2_FORM, NormalFormResult, PreconditionError

HALF = QuadElem(1) / 2


def is_dense_pair(x0: QuadElem, x1: QuadElem) -> bool:
    """Whether Z x0 + Z x1 is dense in R (Q-rank 2 over {1, sqrt d})."""
    return x0.p * x1.q - x0.q * x1.p != 0


def dense_interval_hit(x0, x1, lo, hi) -> tuple[int, int]:
    """Integers (n, m) with ``lo < n x0 + m x1 < hi``."""
    x0, x1, lo, hi = (QuadElem.coerce(v) for v in (x0, x1, lo, hi))
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    if not is_dense_pair(x0, x1):
        raise PreconditionError(f"Z*{x0} + Z*{x1} is not dense")
    width = hi - lo
    u, cu = x0, (1, 0)
    v, cv = x1, (0, 1)
    if u < 0:
        u, cu = -u, (-cu[0], -cu[1])
    if v < 0:
        v, cv = -v, (-cv[0], -cv[1])
    for _ in range(100_000):
        if u < width:
            r, cr = u, cu
            break
        if v < width:
            r, cr = v, cv
            break
        if u < v:
            u, cu, v, cv = v, cv, u, cu
        q = (u / v).floor()
        u = u - v * q
        cu = (cu[0] - q * cv[0], cu[1] - q * cv[1])
    else:
        raise DiscretenessError("dense_interval_hit did not converge")
    t = (lo / r).floor() + 1
    n, m = t * cr[0], t * cr[1]
    val = x0 * n + x1 * m
    assert lo < val < hi
    return n, m


def _check_normalized(chi: PeriodVector):
    if chi.genus != 2:
        raise PreconditionError("genus-2 operation on a character of genus %d" % chi.genus)
    if chi.a(1) != PlanePoint(1, 0) or chi.b(1) != I:
        raise PreconditionError("handle 1 must be normalized to (1, i)")


def _power_of_two_multiplier(c: QuadElem, strict: bool) -> int:
    """k = -sign(c) 2^j with 1/2 <= -k c <= 1 (and < 1 when ``strict``)."""
    a = abs(c)
    j = 0
    while a * (2 ** j) < HALF:
        j += 1
    if a * (2 ** j) > 1:
        raise PreconditionError(f"|{c}| > 1")
    if strict and a * (2 ** j) == 1:
        raise PreconditionError(f"|{c}| = 1 leaves no strict choice")
    k = 2 ** j
    return -k if qsign(c) > 0 else k


def halve_handle(chi: PeriodVector, allow_negative: bool = False):
    """One halving step: new det(a1, b1) lies in [0, det(a1, b1) / 2].

    Requires ``(a1, b1) = (1, i)`` and ``Re b2 = 0``.  When the two handle
    determinants differ the new one is strictly positive.
    """
    _check_normalized(chi)
    a2, b2 = chi.a(2), chi.b(2)
    if b2.re:
        raise PreconditionError("halve_handle needs Re(b2) = 0")
    det2 = chi.handle_det(2)
    if qsign(det2) == 0 or (not allow_negative and qsign(det2) < 0):
        raise PreconditionError(f"det(a2, b2) = {det2} must be positive")
    if abs(det2) > 1:
        raise PreconditionError("det(a2, b2) exceeds det(a1, b1)")
    x, yp = a2.re, b2.im
    one = QuadElem(1)
    if 0 < abs(yp) < one:
        case, c, strict = "b", yp, True
    elif 0 < abs(x) < one:
        case, c, strict = "a", x, True
    elif abs(yp) == one:
        case, c, strict = "b", yp, False
    else:
        case, c, strict = "a", x, False
    k = _power_of_two_multiplier(c, strict)
    if case == "b":
        # (a1, b1 + k b2, a2 - k a1, b2)
        M = move(2, b1={"b1": 1, "b2": k}, a2={"a2": 1, "a1": -k})
    else:
        # (a1 + k a2, b1, a2, b2 - k b1)
        M = move(2, a1={"a1": 1, "a2": k}, b2={"b2": 1, "b1": -k})
    out = apply_sp(M, chi)
    d1 = out.handle_det(1)
    assert 0 <= d1 <= HALF, d1
    return M, out


def resolve_zero_det(chi: PeriodVector):
    """Make both handle determinants positive and unequal when det(a2, b2) = 0."""
    _check_normalized(chi)
    if qsign(chi.handle_det(2)) != 0:
        raise PreconditionError("resolve_zero_det needs det(a2, b2) = 0")
    if image_group(chi).is_lattice:
        raise PreconditionError("image is a lattice")
    g = 2
    gamma = SpMatrix.identity(g)
    cur = chi

    def do(M):
        nonlocal gamma, cur
        cur = apply_sp(M, cur)
        gamma = M @ gamma

    a2, b2 = cur.a(2), cur.b(2)
    if not a2:
        do(move(g, a2={"b2": 1}, b2={"a2": -1}))
        a2, b2 = cur.a(2), cur.b(2)
    # chi = (1, i, z, lambda z) with lambda rational, else the projections are dense
    lam = (b2.re / a2.re) if a2.re else (b2.im / a2.im)
    if not lam.is_rational():
        raise PreconditionError("b2 / a2 is irrational; the dense route applies")
    M, _ = handle_euclid(cur, 2, "plane", zero="b")
    do(M)
    z = cur.a(2)
    if not z.re.is_rational():
        coord = lambda w: w.re
    elif not z.im.is_rational():
        # (a1, b1) -> (b1, -a1); in the frame rotated by -90 degrees x becomes y
        do(move(g, a1={"b1": 1}, b1={"a1": -1}))
        coord = lambda w: w.im
    else:
        raise AssertionError("both coordinates rational: image would be a lattice")
    k = -coord(cur.a(2)).floor()
    do(move(g, b1={"b1": 1, "b2": -k}, a2={"a2": 1, "a1": k}))
    do(move(g, a1={"a1": 1, "a2": -1}, b2={"b2": 1, "b1": 1}))
    d1, d2 = cur.handle_det(1), cur.handle_det(2)
    assert qsign(d1) > 0 and qsign(d2) > 0 and d1 != d2
    return gamma, cur


class _State:
    def __init__(self, chi):
        self.chi = chi
        self.gamma = SpMatrix.identity(chi.genus)
        self.A = GLPlus.identity()

    def sp(self, M):
        self.chi = apply_sp(M, self.chi)
        self.gamma = M @ self.gamma

    def gl(self, A):
        self.chi = apply_gl(A, self.chi)
        self.A = A @ self.A

    def normalize(self):
        if self.chi.handle_det(1) < self.chi.handle_det(2):
            self.sp(swap_handles(2, 0, 1))
        self.gl(GLPlus.from_columns(self.chi.a(1), self.chi.b(1)).inverse())

    def done(self) -> bool:
        d1, d2 = self.chi.handle_det(1), self.chi.handle_det(2)
        return qsign(d2) > 0 and d2 * 2 <= d1


def _dense_finish(st: _State):
    """Handle 2 has dense real projection: one transvection finishes."""
    chi = st.chi
    vol = volume(chi)
    x0, x1 = chi.a(2).re, chi.b(2).re
    lo = vol * 2 / 3 - 1
    hi = vol - 1
    n, m = dense_interval_hit(x0, x1, lo, hi)
    k, s, t = xgcd(n, m)
    if k:
        n1, m1 = n // k, m // k
        st.sp(handle_map(2, 1, [[n1, m1], [-t, s]]))
        # (a1 + k a2, b1, a2, b2 - k b1)
        st.sp(move(2, a1={"a1": 1, "a2": k}, b2={"b2": 1, "b1": -k}))


def genus2_normalize(chi: PeriodVector, max_rounds: int = 1000) -> NormalFormResult:
    if chi.genus != 2:
        raise PreconditionError("genus2_normalize needs genus 2")
    if qsign(volume(chi)) <= 0:
        raise PreconditionError("volume must be positive")
    img = image_group(chi)
    if img.is_lattice:
        raise PreconditionError("image is a lattice; use the lattice normal form")
    st = _State(chi)
    for _ in range(max_rounds):
        st.normalize()
        if st.done():
            break
        a2, b2 = st.chi.a(2), st.chi.b(2)
        if is_dense_pair(a2.re, b2.re):
            _dense_finish(st)
            st.normalize()
            break
        if is_dense_pair(a2.im, b2.im):
            # rotate the plane by -90 degrees, then restore handle 1 to (1, i)
            st.gl(GLPlus(0, 1, -1, 0))
            st.sp(move(2, a1={"b1": 1}, b1={"a1": -1}))
            _dense_finish(st)
            st.normalize()
            break
        M, _ = handle_euclid(st.chi, 2, "re", zero="b")
        st.sp(M)
        if qsign(st.chi.handle_det(2)) == 0:
            gamma, _ = resolve_zero_det(st.chi)
            st.sp(gamma)
        else:
            M, _ = halve_handle(st.chi, allow_negative=True)
            st.sp(M)
    else:
        raise AssertionError("genus-2 reduction did not terminate")
    if not st.done():
        raise AssertionError("genus-2 reduction ended outside the target region")
    U, _, _ = gauss_reduce(st.chi.a(2), st.chi.b(2))
    st.sp(handle_map(2, 1, U))
    out = NormalFormResult(st.A, st.gamma, st.chi, GENUS2_FORM)
    return out
