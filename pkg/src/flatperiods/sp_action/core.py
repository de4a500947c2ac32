"""Elementary Sp(2g, Z) machinery: named basis moves, handle Euclid, transitivity."""
from __future__ import annotations

import re

import numpy as np

from ..chi import PeriodVector, apply_sp
from ..field import PlanePoint, QuadElem, det2, dot, norm_sq, qsign
from ..intlattice import content
from ..matrices import SpMatrix, handle_map, swap_handles

_NAME = re.compile(r"^([ab])(\d+)$")


def _index(name: str) -> int:
    m = _NAME.match(name)
    if m is None:
        raise ValueError(f"bad basis name {name!r}")
    return 2 * (int(m.group(2)) - 1) + (m.group(1) == "b")


def move(g: int, **rows: dict) -> SpMatrix:
    """Basis change given by the new curves in terms of the old ones.

    ``move(2, b1={"b1": 1, "b2": 3}, a2={"a2": 1, "a1": -3})`` is
    ``(a1, b1, a2, b2) -> (a1, b1 + 3 b2, a2 - 3 a1, b2)``.  Unlisted curves are
    kept.  Raises if the result is not symplectic.
    """
    m = np.identity(2 * g, dtype=int).astype(object)
    for new, combo in rows.items():
        r = _index(new)
        m[r, :] = 0
        for old, coef in combo.items():
            m[r, _index(old)] += int(coef)
    return SpMatrix(m)


class DiscretenessError(RuntimeError):
    """A Euclid loop did not terminate: the values generate a dense group."""


class NotPrimitiveError(ValueError):
    pass


# -- Euclid inside one handle ----------------------------------------------------

def _euclid_2x2(x: QuadElem, y: QuadElem, zero: str, positive: bool, max_iter: int):
    """2x2 integer U with U (x, y) = (g, 0) (zero='b') or (0, g) (zero='a')."""
    U = [[1, 0], [0, 1]]

    def left(V):
        nonlocal U
        U = [[V[0][0] * U[0][0] + V[0][1] * U[1][0], V[0][0] * U[0][1] + V[0][1] * U[1][1]],
             [V[1][0] * U[0][0] + V[1][1] * U[1][0], V[1][0] * U[0][1] + V[1][1] * U[1][1]]]

    it = 0
    while y:
        it += 1
        if it > max_iter:
            raise DiscretenessError("Euclid loop exceeded iteration cap; group is not discrete")
        q = (x / y).floor()
        # (a, b) -> (a - q b, b), then (a, b) -> (b, -a)
        left([[1, -q], [0, 1]])
        x = x - y * q
        left([[0, 1], [-1, 0]])
        x, y = y, -x
    if zero == "a":
        left([[0, -1], [1, 0]])
        x, y = y, x  # values (0, g) after (a, b) -> (-b, a)
        val = y
    else:
        val = x
    if positive and qsign(val) < 0:
        left([[-1, 0], [0, -1]])
    return U


def _plane_key(u: PlanePoint, v: PlanePoint):
    w = u if u else v
    if not w:
        return lambda z: QuadElem(0)
    if qsign(det2(u, v)) != 0:
        raise DiscretenessError("handle values are not collinear; Euclid cannot reach zero")
    nw = norm_sq(w)
    return lambda z: dot(z, w) / nw


def handle_euclid(chi: PeriodVector, i: int, coordinate: str = "plane", zero: str = "b",
                  positive: bool = True, max_iter: int = 100_000):
    """Euclid's algorithm on handle ``i`` (1-based) until one value vanishes.

    ``coordinate`` selects what is reduced: ``"re"``, ``"im"`` or ``"plane"``
    (collinear plane values).  With ``zero="b"`` the result has the chosen
    coordinate of ``b_i`` equal to 0 and that of ``a_i`` equal to the gcd.
    """
    a, b = chi.a(i), chi.b(i)
    if coordinate == "re":
        key = lambda z: z.re
    elif coordinate == "im":
        key = lambda z: z.im
    elif coordinate == "plane":
        key = _plane_key(a, b)
    else:
        raise ValueError(f"unknown coordinate {coordinate!r}")
    U = _euclid_2x2(key(a), key(b), zero, positive, max_iter)
    M = handle_map(chi.genus, i - 1, U)
    return M, apply_sp(M, chi)


# -- transitivity on primitive vectors ---------------------------------------------

def _handle_int_euclid(vals: list[int], M: np.ndarray, h: int):
    """Reduce integer handle ``h`` (0-based) to (gcd, 0) in place."""
    U = _euclid_2x2(QuadElem(vals[2 * h]), QuadElem(vals[2 * h + 1]), "b", True, 10_000)
    _apply_handle(vals, M, h, U)


def _apply_handle(vals, M, h, U):
    i, j = 2 * h, 2 * h + 1
    x, y = vals[i], vals[j]
    vals[i], vals[j] = U[0][0] * x + U[0][1] * y, U[1][0] * x + U[1][1] * y
    ri, rj = M[i, :].copy(), M[j, :].copy()
    M[i, :] = U[0][0] * ri + U[0][1] * rj
    M[j, :] = U[1][0] * ri + U[1][1] * rj


def _apply_full(vals, M, S: SpMatrix):
    new = S.apply_int(vals)
    vals[:] = new
    M[:, :] = S.m.dot(M)


def primitive_to_basis(u) -> SpMatrix:
    """Symplectic ``M`` with ``M u = e1`` for a primitive integer vector ``u``."""
    u = [int(x) for x in u]
    if len(u) % 2 or not u:
        raise ValueError("vector length must be even and positive")
    if content(u) != 1:
        raise NotPrimitiveError(f"vector {u} is not primitive (gcd {content(u)})")
    g = len(u) // 2
    vals = list(u)
    M = np.identity(2 * g, dtype=int).astype(object)
    for h in range(g):
        _handle_int_euclid(vals, M, h)
    if vals[0] == 0:
        h = next(h for h in range(g) if vals[2 * h])
        _apply_full(vals, M, swap_handles(g, 0, h))
    for j in range(1, g):
        if vals[2 * j] == 0:
            continue
        aj, bj = f"a{j + 1}", f"b{j + 1}"
        # b1 += a_j, b_j += a1 : values (G, 0, x, 0) -> (G, x, x, G)
        _apply_full(vals, M, move(g, b1={"b1": 1, aj: 1}, **{bj: {bj: 1, "a1": 1}}))
        _handle_int_euclid(vals, M, 0)
        _handle_int_euclid(vals, M, j)
        # a_j -= a1, b1 += b_j : (G', 0, G', 0) -> (G', 0, 0, 0)
        _apply_full(vals, M, move(g, b1={"b1": 1, bj: 1}, **{aj: {aj: 1, "a1": -1}}))
    out = SpMatrix(M)
    assert out.apply_int(u) == [1] + [0] * (2 * g - 1)
    return out


def orbit_map(u, v) -> SpMatrix | None:
    """Symplectic ``M`` with ``M u = v`` when both have the same content, else None."""
    u = [int(x) for x in u]
    v = [int(x) for x in v]
    if len(u) != len(v):
        raise ValueError("length mismatch")
    cu, cv = content(u), content(v)
    if cu == 0 or cv == 0:
        raise ValueError("vectors must be nonzero")
    if cu != cv:
        return None
    Mu = primitive_to_basis([x // cu for x in u])
    Mv = primitive_to_basis([x // cv for x in v])
    return Mv.inverse() @ Mu


# -- two-dimensional lattice reduction -------------------------------------------

def _round(x: QuadElem) -> int:
    return (x + QuadElem(1, 0) / 2).floor()


def gauss_reduce(v1: PlanePoint, v2: PlanePoint):
    """Lagrange-Gauss reduction of the lattice basis (v1, v2).

    Returns ``(A, v1', v2')`` with ``A`` a 2x2 integer matrix of determinant 1
    and ``(v1', v2') = A (v1, v2)``.  ``v1'`` is a shortest nonzero vector and
    ``3 |v1'|^4 <= 4 det(v1', v2')^2``.
    """
    if qsign(det2(v1, v2)) == 0:
        raise ValueError("gauss_reduce needs linearly independent vectors")
    A = [[1, 0], [0, 1]]
    if norm_sq(v2) < norm_sq(v1):
        v1, v2 = v2, -v1
        A = [[0, 1], [-1, 0]]
    while True:
        k = _round(dot(v1, v2) / norm_sq(v1))
        if k:
            v2 = v2 - v1 * k
            A = [A[0], [A[1][0] - k * A[0][0], A[1][1] - k * A[0][1]]]
        if norm_sq(v2) < norm_sq(v1):
            v1, v2 = v2, -v1
            A = [A[1], [-A[0][0], -A[0][1]]]
        else:
            return A, v1, v2


def gauss_bound_holds(v1: PlanePoint, v2: PlanePoint) -> bool:
    """Field-exact form of |v1| <= sqrt(2/sqrt 3) sqrt|det(v1, v2)|."""
    n = norm_sq(v1)
    d = det2(v1, v2)
    return n * n * 3 <= d * d * 4
