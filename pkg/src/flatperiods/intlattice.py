"""Hermite normal form for finitely generated subgroups of Q^n."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def hnf_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form; returns the nonzero rows only.

    Pivots are positive and the entries above each pivot are reduced
    into ``[0, pivot)``.
    """
    A = [list(r) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    out: list[list[int]] = []
    for col in range(ncols):
        live = [r for r in A if r[col] != 0]
        rest = [r for r in A if r[col] == 0]
        if not live:
            continue
        piv = live[0]
        for r in live[1:]:
            g, s, t = xgcd(piv[col], r[col])
            a, b = piv[col] // g, r[col] // g
            new_piv = [s * x + t * y for x, y in zip(piv, r)]
            new_r = [-b * x + a * y for x, y in zip(piv, r)]
            piv = new_piv
            if any(new_r):
                rest.append(new_r)
        if piv[col] < 0:
            piv = [-x for x in piv]
        for k, prev in enumerate(out):
            q = prev[col] // piv[col]
            if q:
                out[k] = [x - q * y for x, y in zip(prev, piv)]
        out.append(piv)
        A = [r for r in rest if any(r)]
    return out


def zbasis(vectors: list[list[Fraction]]) -> list[list[Fraction]]:
    """A Z-basis (HNF, echelon) of the subgroup of Q^n generated by ``vectors``."""
    if not vectors:
        return []
    den = 1
    for v in vectors:
        for x in v:
            den = lcm(den, Fraction(x).denominator)
    rows = [[int(Fraction(x) * den) for x in v] for v in vectors]
    return [[Fraction(x, den) for x in r] for r in hnf_rows(rows)]


def rank(vectors: list[list[Fraction]]) -> int:
    return len(zbasis(vectors))


def content(u) -> int:
    g = 0
    for x in u:
        g = gcd(g, int(x))
    return g


def solve_in_basis(basis: list[list[Fraction]], v: list[Fraction]) -> list[Fraction] | None:
    """Coordinates of ``v`` in an echelon ``basis`` (as from :func:`zbasis`), or None."""
    v = [Fraction(x) for x in v]
    coeffs = []
    for row in basis:
        col = next(i for i, x in enumerate(row) if x != 0)
        c = v[col] / row[col]
        coeffs.append(c)
        v = [x - c * y for x, y in zip(v, row)]
    if any(v):
        return None
    return coeffs
