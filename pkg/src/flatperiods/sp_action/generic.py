"""Generic (non-lattice, genus >= 3) target form: predicate and a search heuristic.

No constructive procedure is known for reaching this form, so the search may
give up; a returned result is always re-checked by :func:`generic_form_check`.
"""
from __future__ import annotations

import random
from typing import Callable, Optional

from ..chi import PeriodVector, apply_gl, apply_sp, image_group, volume
from ..field import PlanePoint, QuadElem, det2, dot, qsign
from ..intlattice import xgcd
from ..matrices import GLPlus, SpMatrix, handle_map, swap_handles
from .core import DiscretenessError, gauss_reduce, move
from .genus2 import is_dense_pair
from .lattice_form import GENERIC_FORM, NormalFormResult, PreconditionError


def same_direction(u: PlanePoint, v: PlanePoint) -> bool:
    """arg(u) == arg(v) for nonzero u, v."""
    return qsign(det2(u, v)) == 0 and qsign(dot(u, v)) > 0


def base_coordinates(chi: PeriodVector, z: PlanePoint) -> tuple[QuadElem, QuadElem]:
    """(s, t) with z = s a1 + t b1."""
    a, b = chi.a(1), chi.b(1)
    D = det2(a, b)
    return det2(z, b) / D, det2(a, z) / D


def generic_form_check(chi: PeriodVector, M) -> bool:
    """Predicate for the generic target form.

    (1) every handle has positive determinant; (2) the axis-parallel bounding
    box of the points M chi(a_i), i >= 2, has a translate inside the open
    parallelogram spanned by chi(a1), chi(b1); (3) chi(a_2), ..., chi(a_g)
    point in pairwise different directions.
    """
    M = QuadElem.coerce(M)
    if qsign(M) <= 0:
        raise ValueError("M must be positive")
    g = chi.genus
    if any(qsign(chi.handle_det(i)) <= 0 for i in range(1, g + 1)):
        return False
    pts = [chi.a(i) * M for i in range(2, g + 1)]
    if pts:
        xs = [p.re for p in pts]
        ys = [p.im for p in pts]
        lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
        corners = [PlanePoint(x, y) for x in (lo_x, hi_x) for y in (lo_y, hi_y)]
        st = [base_coordinates(chi, c) for c in corners]
        # a translate fits in the open parallelogram iff both coordinate spreads are < 1
        for k in (0, 1):
            vals = [c[k] for c in st]
            if not max(vals) - min(vals) < 1:
                return False
    a = [chi.a(i) for i in range(2, g + 1)]
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if same_direction(a[i], a[j]):
                return False
    return True


class _Search:
    def __init__(self, chi: PeriodVector):
        self.chi = chi
        self.gamma = SpMatrix.identity(chi.genus)
        self.A = GLPlus.identity()

    @property
    def g(self):
        return self.chi.genus

    def sp(self, M: SpMatrix):
        self.chi = apply_sp(M, self.chi)
        self.gamma = M @ self.gamma

    def gl(self, A: GLPlus):
        self.chi = apply_gl(A, self.chi)
        self.A = A @ self.A

    def result(self) -> NormalFormResult:
        return NormalFormResult(self.A, self.gamma, self.chi, GENERIC_FORM)

    def copy(self) -> "_Search":
        out = _Search.__new__(_Search)
        out.chi, out.gamma, out.A = self.chi, self.gamma, self.A
        return out

    # -- greedy pieces ---------------------------------------------------------
    def biggest_first(self):
        dets = [self.chi.handle_det(i) for i in range(1, self.g + 1)]
        j = max(range(self.g), key=lambda i: dets[i])
        if j:
            self.sp(swap_handles(self.g, 0, j))

    def shrink_handle(self, j: int, tau: QuadElem) -> bool:
        """Move determinant from handle j to handle 1 until 0 < det_j <= tau."""
        g = self.g
        aj, bj = f"a{j}", f"b{j}"
        for side in ("b1", "a1"):
            chi = self.chi
            if side == "b1":
                u, v = det2(chi.a(j), chi.b(1)), det2(chi.b(j), chi.b(1))
            else:
                u, v = det2(chi.a(1), chi.a(j)), det2(chi.a(1), chi.b(j))
            if not u and not v:
                continue
            U = _small_combination(u, v, tau)
            if U is None:
                continue
            if side == "b1":
                self.sp(handle_map(g, j - 1, U))
                c = det2(self.chi.a(j), self.chi.b(1))
            else:
                # operate on (b_j, a_j) ordering: new b_j carries the small value
                V = [[U[1][1], -U[1][0]], [-U[0][1], U[0][0]]]
                self.sp(handle_map(g, j - 1, V))
                c = det2(self.chi.a(1), self.chi.b(j))
            if not c:
                continue
            dj = self.chi.handle_det(j)
            k = _transfer_multiplier(dj, c)
            if side == "b1":
                # (a1 + k a_j, b1, a_j, b_j - k b1): det_j -> det_j - k c
                self.sp(move(g, a1={"a1": 1, aj: k}, **{bj: {bj: 1, "b1": -k}}))
            else:
                # (a1, b1 + k b_j, a_j - k a1, b_j): det_j -> det_j - k c
                self.sp(move(g, b1={"b1": 1, bj: k}, **{aj: {aj: 1, "a1": -k}}))
            dj = self.chi.handle_det(j)
            if 0 < dj <= tau:
                return True
        return False

    def normalize_plane(self):
        self.gl(GLPlus.from_columns(self.chi.a(1), self.chi.b(1)).inverse())
        for j in range(2, self.g + 1):
            if qsign(self.chi.handle_det(j)) > 0:
                U, _, _ = gauss_reduce(self.chi.a(j), self.chi.b(j))
                self.sp(handle_map(self.g, j - 1, U))

    def separate_directions(self):
        g = self.g
        for _ in range(2 * g):
            clash = None
            for i in range(2, g + 1):
                for j in range(i + 1, g + 1):
                    if same_direction(self.chi.a(i), self.chi.a(j)):
                        clash = j
                        break
                if clash:
                    break
            if clash is None:
                return
            # -Id on the handle reverses a_j and keeps det_j
            self.sp(handle_map(g, clash - 1, [[-1, 0], [0, -1]]))
            still = any(same_direction(self.chi.a(i), self.chi.a(clash))
                        for i in range(2, g + 1) if i != clash)
            if still:
                self.sp(handle_map(g, clash - 1, [[1, 1], [0, 1]]))

    def random_move(self, rng: random.Random):
        g = self.g
        kind = rng.randrange(4)
        i = rng.randrange(1, g + 1)
        j = rng.choice([x for x in range(1, g + 1) if x != i])
        k = rng.choice([-2, -1, 1, 2])
        ai, bi, aj, bj = f"a{i}", f"b{i}", f"a{j}", f"b{j}"
        if kind == 0:
            self.sp(handle_map(g, i - 1, [[1, k], [0, 1]]))
        elif kind == 1:
            self.sp(handle_map(g, i - 1, [[1, 0], [k, 1]]))
        elif kind == 2:
            self.sp(move(g, **{ai: {ai: 1, aj: k}, bj: {bj: 1, bi: -k}}))
        else:
            self.sp(move(g, **{bi: {bi: 1, bj: k}, aj: {aj: 1, ai: -k}}))


def _small_combination(u: QuadElem, v: QuadElem, tau: QuadElem):
    """Unimodular U whose first row (n, m) gives 0 < |n u + m v| <= tau, if possible."""
    cu, cv = [1, 0], [0, 1]
    if u < 0:
        u, cu = -u, [-1, 0]
    if v < 0:
        v, cv = -v, [0, -1]
    best = None
    for _ in range(2000):
        for val, c in ((u, cu), (v, cv)):
            if val and val <= tau:
                best = c
                break
        if best or not u or not v:
            break
        if u < v:
            u, cu, v, cv = v, cv, u, cu
        q = (u / v).floor()
        u = u - v * q
        cu = [cu[0] - q * cv[0], cu[1] - q * cv[1]]
    if best is None:
        for val, c in ((u, cu), (v, cv)):
            if val:
                best = c
                break
    if best is None:
        return None
    n, m = best
    gcd_, s, t = xgcd(n, m)
    if gcd_ != 1:
        return None
    return [[n, m], [-t, s]]


def _transfer_multiplier(dj: QuadElem, c: QuadElem) -> int:
    """k with 0 < dj - k c <= |c|."""
    ac = abs(c)
    r = (dj / ac)
    n = r.floor()
    if QuadElem(n) == r:
        n -= 1
    # dj - n |c| in (0, |c|]
    return n if qsign(c) > 0 else -n


def generic_normalize_heuristic(
    chi: PeriodVector,
    M,
    max_steps: int = 200,
    seed: int = 0,
    accept: Optional[Callable[[PeriodVector], bool]] = None,
) -> Optional[NormalFormResult]:
    """Search the Sp(2g, Z) x GL2+ orbit for a character passing the generic check.

    ``accept`` is an extra acceptance test (e.g. the builder's packing test).
    Returns None once ``max_steps`` rounds are used up.  Deterministic for a
    fixed ``seed``.
    """
    M = QuadElem.coerce(M)
    if chi.genus < 3:
        raise PreconditionError("the generic form is for genus >= 3")
    if qsign(volume(chi)) <= 0:
        raise PreconditionError("volume must be positive")
    if image_group(chi).is_lattice:
        raise PreconditionError("image is a lattice")

    def ok(c):
        return generic_form_check(c, M) and (accept is None or accept(c))

    start = _Search(chi)
    if ok(chi):
        return start.result()
    rng = random.Random(seed)
    g = chi.genus
    cur = start
    for step in range(max_steps):
        trial = cur.copy()
        try:
            trial.biggest_first()
            tau = trial.chi.handle_det(1) / (64 * (g * (M + 1)) * (g * (M + 1)))
            for j in range(2, g + 1):
                trial.shrink_handle(j, tau)
            trial.biggest_first()
            if qsign(trial.chi.handle_det(1)) > 0:
                trial.normalize_plane()
                trial.separate_directions()
                if ok(trial.chi):
                    res = trial.result()
                    assert res.recomputes(chi)
                    return res
        except (DiscretenessError, ZeroDivisionError, ValueError):
            pass
        for _ in range(1 + rng.randrange(3)):
            cur.random_move(rng)
    return None
