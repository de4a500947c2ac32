"""Translation surfaces as polygons glued along edges by translations.

A half-edge is a pair ``(polygon, edge)``; polygons list their edge vectors
counter-clockwise.  Corner ``(p, i)`` is the start point of edge ``i`` of
polygon ``p``.  Cone angles are exact integer numbers of full turns.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .chi import Partition, PeriodVector, cover_data, volume, image_group
from .field import PlanePoint, QuadElem, det2, dot, format_point, parse_point, qsign, _join
from .intlattice import hnf_rows, xgcd
from .matrices import standard_J

HalfEdge = tuple


class SurfaceError(ValueError):
    """Malformed surface or curve."""


@dataclass(frozen=True)
class MarkedCurve:
    """Closed edge path: a sequence of half-edges, each traversed forwards."""

    steps: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((int(p), int(i)) for p, i in self.steps))

    def __len__(self):
        return len(self.steps)

    def __add__(self, other: "MarkedCurve") -> "MarkedCurve":
        return MarkedCurve(self.steps + other.steps)

    def renamed(self, name: str) -> "MarkedCurve":
        return MarkedCurve(self.steps, name)


@dataclass(frozen=True)
class VertexCycle:
    corners: tuple
    turns: int

    @property
    def order(self) -> int:
        """Zero order n with angle 2 pi (n + 1)."""
        return self.turns - 1


def _half(z: PlanePoint) -> int:
    s = qsign(z.im)
    return 0 if s > 0 or (s == 0 and qsign(z.re) > 0) else 1


def _angle_less(u: PlanePoint, w: PlanePoint) -> bool:
    """arg(u) < arg(w) with arguments taken in [0, 2 pi)."""
    hu, hw = _half(u), _half(w)
    if hu != hw:
        return hu < hw
    return qsign(det2(u, w)) > 0


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Closed segments [p1, p2] and [q1, q2] meet."""
    d1 = qsign(det2(q2 - q1, p1 - q1))
    d2 = qsign(det2(q2 - q1, p2 - q1))
    d3 = qsign(det2(p2 - p1, q1 - p1))
    d4 = qsign(det2(p2 - p1, q2 - p1))
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on(a, b, c):
        # c on segment [a, b], given collinear
        return qsign(dot(c - a, c - b)) <= 0

    if d1 == 0 and on(q1, q2, p1):
        return True
    if d2 == 0 and on(q1, q2, p2):
        return True
    if d3 == 0 and on(p1, p2, q1):
        return True
    if d4 == 0 and on(p1, p2, q2):
        return True
    return False


class TranslationSurface:
    """Polygons with a fixed-point-free pairing of half-edges by translations."""

    def __init__(self, polygons, pairing, check: bool = True):
        self.polygons = [tuple(PlanePoint.coerce(v) for v in poly) for poly in polygons]
        pair = {}
        items = pairing.items() if isinstance(pairing, dict) else pairing
        for h1, h2 in items:
            h1, h2 = (int(h1[0]), int(h1[1])), (int(h2[0]), int(h2[1]))
            for x, y in ((h1, h2), (h2, h1)):
                if pair.get(x, y) != y:
                    raise SurfaceError(f"half-edge {x} paired twice")
                pair[x] = y
        self.pairing = pair
        self._cycles = None
        self._corner_vertex = None
        if check:
            self.validate()

    # -- basic access -------------------------------------------------------
    @property
    def d(self) -> int:
        d = 1
        for poly in self.polygons:
            for v in poly:
                d = _join(_join(d, v.re.d), v.im.d)
        return d

    def half_edges(self) -> list:
        return [(p, i) for p, poly in enumerate(self.polygons) for i in range(len(poly))]

    def vector(self, h) -> PlanePoint:
        return self.polygons[h[0]][h[1]]

    def partner(self, h):
        return self.pairing[h]

    def next_in_polygon(self, h):
        p, i = h
        return (p, (i + 1) % len(self.polygons[p]))

    def prev_in_polygon(self, h):
        p, i = h
        return (p, (i - 1) % len(self.polygons[p]))

    # -- validation ---------------------------------------------------------
    def validate(self):
        if not self.polygons:
            raise SurfaceError("no polygons")
        for p, poly in enumerate(self.polygons):
            self._check_polygon(p, poly)
        hs = self.half_edges()
        for h in hs:
            if h not in self.pairing:
                raise SurfaceError(f"half-edge {h} is unpaired")
            o = self.pairing[h]
            if o == h:
                raise SurfaceError(f"half-edge {h} paired with itself")
            if o[0] >= len(self.polygons) or o[1] >= len(self.polygons[o[0]]):
                raise SurfaceError(f"half-edge {h} paired with missing {o}")
            if self.pairing[o] != h:
                raise SurfaceError(f"pairing is not an involution at {h}")
            if self.vector(o) != -self.vector(h):
                raise SurfaceError(f"paired half-edges {h}, {o} are not opposite translates")
        if len(self.pairing) != len(hs):
            raise SurfaceError("pairing mentions half-edges that do not exist")
        seen = {0}
        todo = [0]
        while todo:
            p = todo.pop()
            for i in range(len(self.polygons[p])):
                q = self.pairing[(p, i)][0]
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        if len(seen) != len(self.polygons):
            raise SurfaceError("glued complex is not connected")
        self.vertex_cycles()

    @staticmethod
    def _check_polygon(p, poly):
        n = len(poly)
        if n < 3:
            raise SurfaceError(f"polygon {p} has fewer than 3 edges")
        if any(not v for v in poly):
            raise SurfaceError(f"polygon {p} has a zero edge")
        total = PlanePoint(0, 0)
        pts = []
        for v in poly:
            pts.append(total)
            total = total + v
        if total:
            raise SurfaceError(f"polygon {p} does not close (sum {total})")
        area = QuadElem(0)
        for k in range(n):
            area = area + det2(pts[k], pts[(k + 1) % n])
        if qsign(area) <= 0:
            raise SurfaceError(f"polygon {p} is not counter-clockwise")
        for k in range(n):
            u, w = poly[k], poly[(k + 1) % n]
            if qsign(det2(u, w)) == 0 and qsign(dot(u, w)) < 0:
                raise SurfaceError(f"polygon {p} folds back at vertex {(k + 1) % n}")
        for k in range(n):
            for m in range(k + 2, n):
                if k == 0 and m == n - 1:
                    continue
                if _segments_cross(pts[k], pts[(k + 1) % n], pts[m], pts[(m + 1) % n]):
                    raise SurfaceError(f"polygon {p} is not simple (edges {k}, {m})")

    # -- vertices -----------------------------------------------------------
    def next_ccw(self, corner):
        """Corner met when turning counter-clockwise past the incoming edge."""
        return self.pairing[self.prev_in_polygon(corner)]

    def vertex_cycles(self) -> list:
        if self._cycles is not None:
            return self._cycles
        seen = {}
        cycles = []
        for c0 in self.half_edges():
            if c0 in seen:
                continue
            corners = []
            turns = 0
            c = c0
            while True:
                seen[c] = len(cycles)
                corners.append(c)
                u = self.vector(c)
                w = -self.vector(self.prev_in_polygon(c))
                if not _angle_less(u, w):
                    turns += 1
                c = self.next_ccw(c)
                if c == c0:
                    break
                if c in seen:
                    raise SurfaceError("corner orbit does not close")
            if turns < 1:
                raise SurfaceError(f"vertex at corner {c0} has angle that is not a positive multiple of 2 pi")
            cycles.append(VertexCycle(tuple(corners), turns))
        self._cycles = cycles
        self._corner_vertex = seen
        return cycles

    def vertex_of(self, corner) -> int:
        self.vertex_cycles()
        return self._corner_vertex[corner]

    def start_vertex(self, h) -> int:
        return self.vertex_of(h)

    def end_vertex(self, h) -> int:
        return self.vertex_of(self.next_in_polygon(h))

    # -- text format --------------------------------------------------------
    def to_text(self, curves: Iterable[MarkedCurve] = ()) -> str:
        out = [f"TSURF 1 d={self.d}"]
        for poly in self.polygons:
            out.append("polygon " + "; ".join(format_point(v) for v in poly))
        for h in sorted(self.pairing):
            o = self.pairing[h]
            if h < o:
                out.append(f"pair (({h[0]}, {h[1]}), ({o[0]}, {o[1]}))")
        for c in curves:
            steps = " ".join(f"({p}, {i})" for p, i in c.steps)
            out.append(f"curve {c.name or '-'} {steps}".rstrip())
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str, check: bool = True):
        """Parse TSURF text; returns ``(surface, curves)``."""
        import re

        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or not re.match(r"^TSURF 1 d=\d+$", lines[0]):
            raise SurfaceError("line 1: expected header 'TSURF 1 d=<d>'")
        polys, pairs, curves = [], [], []
        num = re.compile(r"-?\d+")
        for k, ln in enumerate(lines[1:], start=2):
            key, _, rest = ln.partition(" ")
            try:
                if key == "polygon":
                    polys.append([parse_point(t) for t in rest.split(";")])
                elif key == "pair":
                    a, b, c, d = (int(x) for x in num.findall(rest))
                    pairs.append(((a, b), (c, d)))
                elif key == "curve":
                    name, _, steps = rest.partition(" ")
                    vals = [int(x) for x in num.findall(steps)]
                    st = list(zip(vals[0::2], vals[1::2]))
                    curves.append(MarkedCurve(st, "" if name == "-" else name))
                else:
                    raise SurfaceError(f"unknown record {key!r}")
            except SurfaceError as e:
                raise SurfaceError(f"line {k}: {e}") from None
            except ValueError as e:
                raise SurfaceError(f"line {k}: {e}") from None
        return cls(polys, pairs, check=check), curves


# -- invariants ------------------------------------------------------------------

def vertex_cycles(s: TranslationSurface) -> list:
    return s.vertex_cycles()


def euler_and_genus(s: TranslationSurface) -> tuple:
    V = len(s.vertex_cycles())
    E = len(s.pairing) // 2
    F = len(s.polygons)
    chi_top = V - E + F
    if chi_top % 2:
        raise SurfaceError(f"odd Euler characteristic {chi_top}")
    return V, E, F, (2 - chi_top) // 2


def area(s: TranslationSurface) -> QuadElem:
    """Total area of the polygons."""
    total = QuadElem(0)
    for poly in s.polygons:
        z = PlanePoint(0, 0)
        for v in poly:
            total = total + det2(z, v)
            z = z + v
    return total / 2


def genus(s: TranslationSurface) -> int:
    return euler_and_genus(s)[3]


def stratum(s: TranslationSurface) -> Partition:
    g = genus(s)
    if g < 2:
        raise SurfaceError(f"genus {g} surface has no stratum H(n_1, ..., n_k)")
    parts = [c.order for c in s.vertex_cycles() if c.turns > 1]
    if sum(parts) != 2 * g - 2:
        raise SurfaceError(f"Gauss-Bonnet fails: zero orders {parts}, genus {g}")
    return Partition(tuple(parts), g)


def check_closed(s: TranslationSurface, c: MarkedCurve):
    if not c.steps:
        raise SurfaceError("empty curve")
    n = len(c.steps)
    for k in range(n):
        h, nxt = c.steps[k], c.steps[(k + 1) % n]
        if h not in s.pairing or nxt not in s.pairing:
            raise SurfaceError(f"curve step {h} is not a half-edge")
        if s.end_vertex(h) != s.start_vertex(nxt):
            raise SurfaceError(f"curve breaks between steps {k} and {(k + 1) % n}")


def period(s: TranslationSurface, c: MarkedCurve) -> PlanePoint:
    check_closed(s, c)
    total = PlanePoint(0, 0)
    for h in c.steps:
        total = total + s.vector(h)
    return total


def reverse_curve(s: TranslationSurface, c: MarkedCurve) -> MarkedCurve:
    return MarkedCurve(tuple(s.partner(h) for h in reversed(c.steps)), c.name)


def _crossings(s: TranslationSurface, c: MarkedCurve) -> dict:
    """Rays crossed by the left push-off of ``c`` near the vertices it visits.

    A ray is named by the half-edge leaving the vertex along it.  At a visit the
    push-off sweeps clockwise from the incoming ray to the outgoing one through
    the sector on the left of the path.
    """
    out = {}
    n = len(c.steps)
    for k in range(n):
        h_in, h_out = c.steps[k - 1], c.steps[k]
        r_in = s.partner(h_in)
        r = s.next_ccw(h_out)
        guard = 0
        while r != r_in:
            out[r] = out.get(r, 0) + 1
            r = s.next_ccw(r)
            guard += 1
            if guard > len(s.pairing):
                raise SurfaceError("curve does not pass through consistent vertices")
    return out


def intersection_number(s: TranslationSurface, c1: MarkedCurve, c2: MarkedCurve) -> int:
    """Algebraic intersection c1 . c2, positive for (horizontal, vertical) on a torus."""
    check_closed(s, c1)
    check_closed(s, c2)
    cross = _crossings(s, c2)
    total = 0
    for h in c1.steps:
        # c1 leaves along ray h and arrives along ray partner(h)
        total -= cross.get(h, 0)
        total += cross.get(s.partner(h), 0)
    return total


def intersection_matrix(s: TranslationSurface, curves) -> np.ndarray:
    n = len(curves)
    m = np.zeros((n, n), dtype=object)
    cross = [_crossings(s, c) for c in curves]
    for i, c1 in enumerate(curves):
        for j in range(n):
            t = 0
            for h in c1.steps:
                t += cross[j].get(s.partner(h), 0) - cross[j].get(h, 0)
            m[i, j] = t
    return m


# -- homology ----------------------------------------------------------------------

def _tree_cotree(s: TranslationSurface):
    """Loops at a root vertex, one for each edge outside a tree-cotree pair."""
    s.vertex_cycles()
    edges = sorted({min(h, s.partner(h)) for h in s.pairing})
    root = s.start_vertex(edges[0])
    # spanning tree of the 1-skeleton: parent half-edge pointing towards the root
    to_root = {root: []}
    queue = deque([root])
    adj = {}
    for h in s.pairing:
        adj.setdefault(s.start_vertex(h), []).append(h)
    tree = set()
    while queue:
        v = queue.popleft()
        for h in sorted(adj.get(v, [])):
            w = s.end_vertex(h)
            if w not in to_root:
                # path from w back to root: partner(h) then v's path
                to_root[w] = [s.partner(h)] + to_root[v]
                tree.add(min(h, s.partner(h)))
                queue.append(w)
    # spanning tree of the dual graph over the remaining edges
    seen = {0}
    queue = deque([0])
    cotree = set()
    while queue:
        p = queue.popleft()
        for i in range(len(s.polygons[p])):
            h = (p, i)
            e = min(h, s.partner(h))
            if e in tree:
                continue
            q = s.partner(h)[0]
            if q not in seen:
                seen.add(q)
                cotree.add(e)
                queue.append(q)
    loops = []
    for e in edges:
        if e in tree or e in cotree:
            continue
        u, w = s.start_vertex(e), s.end_vertex(e)
        from_root = [s.partner(x) for x in reversed(to_root[u])]
        loops.append(MarkedCurve(tuple(from_root + [e] + to_root[w])))
    return loops


def homology_loops(s: TranslationSurface) -> list:
    """Closed curves at one vertex whose classes generate H1(S; Z)."""
    return _tree_cotree(s)


def _combine(s: TranslationSurface, loops, coeffs, name="") -> MarkedCurve:
    steps = []
    for c, loop in zip(coeffs, loops):
        c = int(c)
        piece = loop if c > 0 else reverse_curve(s, loop)
        steps.extend(list(piece.steps) * abs(c))
    # cancel immediate backtracks
    out = []
    for h in steps:
        if out and s.partner(out[-1]) == h:
            out.pop()
        else:
            out.append(h)
    while len(out) > 1 and s.partner(out[-1]) == out[0]:
        out.pop()
        out.pop(0)
    if not out:
        raise SurfaceError("combination is null-homotopic")
    return MarkedCurve(tuple(out), name)


def symplectic_coefficients(Q) -> list:
    """Integer rows P with P Q P^T = J for a unimodular antisymmetric Q."""
    n = len(Q)
    Q = np.array(Q, dtype=object)
    basis = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    pairs = []

    def form(x, y):
        return int(np.dot(np.dot(np.array(x, dtype=object), Q), np.array(y, dtype=object)))

    while basis:
        e = basis[0]
        vals = [form(e, b) for b in basis]
        # find f with form(e, f) = 1 via extended gcd over vals
        g, coef = 0, [0] * len(basis)
        for k, v in enumerate(vals):
            if v == 0:
                continue
            if g == 0:
                g, coef = abs(v), [0] * len(basis)
                coef[k] = 1 if v > 0 else -1
                continue
            gg, s1, t1 = xgcd(g, v)
            coef = [s1 * c for c in coef]
            coef[k] += t1
            g = gg
        if g != 1:
            raise SurfaceError(f"intersection form is degenerate (gcd {g})")
        f = [sum(c * b[j] for c, b in zip(coef, basis)) for j in range(n)]
        assert form(e, f) == 1
        pairs.append((e, f))
        rest = []
        for b in basis[1:]:
            ib_f, ib_e = form(f, b), form(e, b)
            rest.append([b[j] + ib_f * e[j] - ib_e * f[j] for j in range(n)])
        basis = hnf_rows(rest) if rest else []
    return [v for pair in pairs for v in pair]


def symplectic_homology_basis(s: TranslationSurface) -> list:
    """2g closed curves whose intersection matrix is the standard J."""
    loops = _tree_cotree(s)
    g = genus(s)
    if len(loops) != 2 * g:
        raise SurfaceError(f"rank defect: {len(loops)} generators for genus {g}")
    Q = intersection_matrix(s, loops)
    P = symplectic_coefficients(Q)
    names = [f"{ab}{i + 1}" for i in range(g) for ab in "ab"]
    curves = [_combine(s, loops, row, name) for row, name in zip(P, names)]
    if not np.array_equal(intersection_matrix(s, curves), standard_J(g)):
        raise SurfaceError("symplectic reduction failed")
    return curves


# -- certificate verification ----------------------------------------------------------

CHECK_NAMES = {
    1: "matrices",
    2: "recomputation",
    3: "surface",
    4: "genus",
    5: "stratum",
    6: "intersection",
    7: "periods",
    8: "volume",
    9: "cover",
}


@dataclass
class CheckResult:
    number: int
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list:
        return [c.number for c in self.checks if not c.ok]

    def to_text(self) -> str:
        lines = [f"check{c.number}_{c.name}={'pass' if c.ok else 'fail'}"
                 + (f" detail={c.detail}" if c.detail and not c.ok else "")
                 for c in self.checks]
        lines.append(f"verdict={'VERIFIED' if self.ok else 'FAILED'}")
        return "\n".join(lines) + "\n"


def verify_certificate(cert) -> VerificationReport:
    """Re-check a realization certificate from scratch; never raises."""
    report = VerificationReport()
    surf = None

    def run(num, fn):
        try:
            res = fn()
            ok, detail = (res, "") if isinstance(res, bool) else res
        except Exception as e:  # a failed check, whatever broke
            ok, detail = False, f"{type(e).__name__}: {e}"
        report.checks.append(CheckResult(num, CHECK_NAMES[num], bool(ok), str(detail)))

    def c1():
        if not cert.gamma.is_symplectic():
            return False, "gamma is not symplectic"
        if qsign(cert.A.det()) <= 0:
            return False, "det A <= 0"
        return True

    def c2():
        from .chi import apply_gl, apply_sp

        return apply_gl(cert.A, apply_sp(cert.gamma, cert.chi_original)) == cert.chi_prime

    def c3():
        nonlocal surf
        surf = TranslationSurface(cert.surface.polygons, cert.surface.pairing, check=True)
        for c in cert.marked_basis:
            check_closed(surf, c)
        return True

    def c4():
        g = genus(surf)
        return g == cert.chi_prime.genus, f"surface genus {g}"

    def c5():
        st = stratum(surf)
        return st == cert.partition, f"stratum {st}"

    def c6():
        m = intersection_matrix(surf, list(cert.marked_basis))
        J = standard_J(cert.chi_prime.genus)
        return bool(np.array_equal(m, J)), "intersection matrix differs from J"

    def c7():
        if len(cert.marked_basis) != len(cert.chi_prime):
            return False, "wrong number of marked curves"
        bad = [j for j, c in enumerate(cert.marked_basis) if period(surf, c) != cert.chi_prime[j]]
        return not bad, f"period mismatch at {bad}"

    def c8():
        pers = [period(surf, c) for c in cert.marked_basis]
        s_vol = QuadElem(0)
        for i in range(0, len(pers), 2):
            s_vol = s_vol + det2(pers[i], pers[i + 1])
        v1 = volume(cert.chi_prime)
        v0 = cert.A.det() * volume(cert.chi_original)
        a = area(surf)
        return s_vol == v1 == v0 == a, f"volumes {s_vol}, {v1}, {v0}, area {a}"

    def c9():
        if not image_group(cert.chi_original).is_lattice:
            return True
        cover_data(cert)
        return True

    for num, fn in ((1, c1), (2, c2), (3, c3)):
        run(num, fn)
    if surf is None:
        for num in (4, 5, 6, 7, 8):
            report.checks.append(CheckResult(num, CHECK_NAMES[num], False, "surface invalid"))
    else:
        for num, fn in ((4, c4), (5, c5), (6, c6), (7, c7), (8, c8)):
            run(num, fn)
    run(9, c9)
    return report
