"""Integer symplectic matrices and exact positive-determinant plane maps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import PlanePoint, QuadElem, qsign, format_quad, parse_quad


def standard_J(g: int) -> np.ndarray:
    """Symplectic form in the ordering (a1, b1, ..., ag, bg)."""
    J = np.zeros((2 * g, 2 * g), dtype=object)
    for i in range(g):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = -1
    return J


def int_matrix(rows) -> np.ndarray:
    m = np.array([[int(x) for x in row] for row in rows], dtype=object)
    return m


class SpMatrix:
    """Element of Sp(2g, Z) acting on period vectors by ``chi' = M chi``.

    Row ``j`` of ``m`` expresses the new basis curve ``j`` in the old basis.
    """

    __slots__ = ("g", "m")

    def __init__(self, m, g: int | None = None, check: bool = True):
        m = int_matrix(m)
        n = m.shape[0]
        if m.shape != (n, n) or n % 2:
            raise ValueError(f"expected a 2g x 2g matrix, got shape {m.shape}")
        self.g = n // 2 if g is None else g
        if 2 * self.g != n:
            raise ValueError("genus does not match matrix size")
        self.m = m
        if check and not self.is_symplectic():
            raise ValueError("matrix is not symplectic")

    @classmethod
    def identity(cls, g: int) -> "SpMatrix":
        return cls(np.identity(2 * g, dtype=int).astype(object), check=False)

    def is_symplectic(self) -> bool:
        J = standard_J(self.g)
        return bool(np.array_equal(self.m.T.dot(J).dot(self.m), J))

    def __matmul__(self, other: "SpMatrix") -> "SpMatrix":
        if other.g != self.g:
            raise ValueError("genus mismatch")
        return SpMatrix(self.m.dot(other.m), check=False)

    def inverse(self) -> "SpMatrix":
        # M^{-1} = -J M^T J for symplectic M
        J = standard_J(self.g)
        return SpMatrix(-J.dot(self.m.T).dot(J), check=False)

    def apply_int(self, u) -> list[int]:
        return [int(x) for x in self.m.dot(np.array([int(v) for v in u], dtype=object))]

    def __eq__(self, other):
        return isinstance(other, SpMatrix) and np.array_equal(self.m, other.m)

    def __hash__(self):
        return hash(tuple(map(tuple, self.m.tolist())))

    def __repr__(self):
        return f"SpMatrix({self.m.tolist()})"

    def to_text(self) -> str:
        lines = [str(self.g)]
        lines += [" ".join(str(int(x)) for x in row) for row in self.m]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, check: bool = True) -> "SpMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        g = int(lines[0])
        rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
        if len(rows) != 2 * g or any(len(r) != 2 * g for r in rows):
            raise ValueError("SpMatrix text has wrong dimensions")
        return cls(rows, g=g, check=check)


# -- elementary generators ---------------------------------------------------

def embed(g: int, block, at: int) -> SpMatrix:
    """Identity with a 2x2 (or 4x4) block placed on handle ``at`` (0-based)."""
    m = np.identity(2 * g, dtype=int).astype(object)
    block = int_matrix(block)
    k = block.shape[0]
    m[2 * at:2 * at + k, 2 * at:2 * at + k] = block
    return SpMatrix(m, check=False)


def handle_map(g: int, i: int, rows) -> SpMatrix:
    """SL2 block acting on handle ``i`` (0-based): (a_i, b_i) -> rows."""
    return embed(g, rows, i)


def pair_map(g: int, i: int, j: int, rows4) -> SpMatrix:
    """4x4 block on handles i, j (0-based) in the order (a_i, b_i, a_j, b_j)."""
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    m = np.identity(2 * g, dtype=int).astype(object)
    r = int_matrix(rows4)
    for s in range(4):
        for t in range(4):
            m[idx[s], idx[t]] = r[s, t]
    return SpMatrix(m, check=False)


def swap_handles(g: int, i: int, j: int) -> SpMatrix:
    return pair_map(g, i, j, [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])


class GLPlus:
    """2x2 matrix over the field with positive determinant, acting on (re, im)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, check: bool = True):
        self.a, self.b, self.c, self.d = (QuadElem.coerce(x) for x in (a, b, c, d))
        if check and qsign(self.det()) <= 0:
            raise ValueError("GL2+ element must have positive determinant")

    @classmethod
    def identity(cls) -> "GLPlus":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_columns(cls, u: PlanePoint, v: PlanePoint) -> "GLPlus":
        """Map sending 1 to ``u`` and i to ``v``."""
        return cls(u.re, v.re, u.im, v.im)

    def det(self) -> QuadElem:
        return self.a * self.d - self.b * self.c

    def __call__(self, z: PlanePoint) -> PlanePoint:
        return PlanePoint(self.a * z.re + self.b * z.im, self.c * z.re + self.d * z.im)

    def __matmul__(self, o: "GLPlus") -> "GLPlus":
        return GLPlus(
            self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d,
            check=False,
        )

    def inverse(self) -> "GLPlus":
        det = self.det()
        return GLPlus(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __eq__(self, o):
        return isinstance(o, GLPlus) and (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __repr__(self):
        return f"GLPlus({self.a}, {self.b}, {self.c}, {self.d})"

    def to_text(self) -> str:
        return "\n".join([
            f"{format_quad(self.a)} {format_quad(self.b)}",
            f"{format_quad(self.c)} {format_quad(self.d)}",
        ]) + "\n"

    @classmethod
    def from_text(cls, text: str, check: bool = True) -> "GLPlus":
        toks = text.split()
        if len(toks) != 4:
            raise ValueError("GLPlus text needs 4 entries")
        return cls(*(parse_quad(t) for t in toks), check=check)
