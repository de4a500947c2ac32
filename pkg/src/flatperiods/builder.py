"""Slit constructions: diagrams of parallelograms with glued slits, compiled to
translation surfaces, plus the end-to-end ``realize`` dispatcher.

Conventions.  A slit from ``P`` to ``P + v`` has a ``+`` bank (its left side)
and a ``-`` bank.  A handle sheet ``(a, b)`` acts like a slit of vector ``a``
whose ``+`` bank is its bottom side and ``-`` bank its top side.  A gluing
group ``[d_1, ..., d_r]`` identifies ``d_i+`` with ``d_(i+1)-`` cyclically.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .chi import (
    NotRealizable,
    Partition,
    PeriodVector,
    decide,
    image_group,
    volume,
)
from .field import I, PlanePoint, QuadElem, det2, dot, norm_sq, qsign
from .matrices import GLPlus, SpMatrix
from .sp_action import (
    NormalFormResult,
    generic_form_check,
    generic_normalize_heuristic,
    genus2_normalize,
    lattice_normal_form,
    same_direction,
)
from .surface import (
    MarkedCurve,
    TranslationSurface,
    _combine,
    _segments_cross,
    homology_loops,
    intersection_matrix,
    period,
    stratum,
    genus as surface_genus,
    symplectic_coefficients,
)


class PackingError(ValueError):
    """Slits cannot be placed (containment or overlap)."""


class BuilderPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class HeuristicExhausted:
    """The genus >= 3 search gave up; says nothing about realizability."""

    max_steps: int
    seed: int

    def __bool__(self):
        return False


# -- diagrams ------------------------------------------------------------------------

TORUS = "torus"
HANDLE = "handle"


@dataclass(frozen=True)
class Sheet:
    a: PlanePoint
    b: PlanePoint
    kind: str
    handle: int  # index (1-based) of the handle whose periods this sheet carries

    def coords(self, z: PlanePoint):
        D = det2(self.a, self.b)
        return det2(z, self.b) / D, det2(self.a, z) / D

    def point(self, s, t) -> PlanePoint:
        return self.a * s + self.b * t

    def strictly_inside(self, z: PlanePoint) -> bool:
        s, t = self.coords(z)
        return 0 < s < 1 and 0 < t < 1


@dataclass(frozen=True)
class Slit:
    sheet: int
    start: PlanePoint
    vector: PlanePoint
    tag: str = ""

    @property
    def end(self) -> PlanePoint:
        return self.start + self.vector


@dataclass(frozen=True)
class SlitDiagram:
    """Sheets (sheet 0 is the base), slits, and cyclic gluing groups.

    A group entry is ``("slit", k)`` or ``("sheet", k)`` (a handle sheet).
    """

    sheets: tuple
    slits: tuple = ()
    groups: tuple = ()

    @classmethod
    def from_base(cls, a: PlanePoint, b: PlanePoint) -> "SlitDiagram":
        a, b = PlanePoint.coerce(a), PlanePoint.coerce(b)
        if qsign(det2(a, b)) <= 0:
            raise BuilderPreconditionError("base parallelogram needs det(a, b) > 0")
        return cls((Sheet(a, b, TORUS, 1),))

    @property
    def base(self) -> Sheet:
        return self.sheets[0]

    def add_sheet(self, sheet: Sheet):
        return replace(self, sheets=self.sheets + (sheet,)), len(self.sheets)

    def add_slit(self, slit: Slit):
        self._check_slit(slit)
        return replace(self, slits=self.slits + (slit,)), len(self.slits)

    def add_group(self, group):
        return replace(self, groups=self.groups + (tuple(group),))

    def _check_slit(self, slit: Slit):
        sh = self.sheets[slit.sheet]
        if not slit.vector:
            raise PackingError(f"slit {slit.tag!r} has zero length")
        for z in (slit.start, slit.end):
            if not sh.strictly_inside(z):
                raise PackingError(f"slit {slit.tag!r} leaves its parallelogram at {z}")
        for other in self.slits:
            if other.sheet == slit.sheet and _illegal_overlap(slit, other):
                raise PackingError(f"slit {slit.tag!r} meets slit {other.tag!r} illegally")

    def validate(self):
        for k, sl in enumerate(self.slits):
            rest = SlitDiagram(self.sheets, self.slits[:k])
            rest._check_slit(sl)
        used = {}
        for grp in self.groups:
            vecs = set()
            for ref in grp:
                if ref in used:
                    raise BuilderPreconditionError(f"{ref} appears in two gluing groups")
                used[ref] = True
                if ref[0] == "slit":
                    vecs.add(self.slits[ref[1]].vector)
                else:
                    sh = self.sheets[ref[1]]
                    if sh.kind != HANDLE:
                        raise BuilderPreconditionError(f"sheet {ref[1]} is not a handle sheet")
                    vecs.add(sh.a)
            if len(vecs) != 1:
                raise BuilderPreconditionError("a gluing group mixes slit vectors")
        for k in range(len(self.slits)):
            if ("slit", k) not in used:
                raise BuilderPreconditionError(f"slit {k} is not glued")
        for k, sh in enumerate(self.sheets):
            if sh.kind == HANDLE and ("sheet", k) not in used:
                raise BuilderPreconditionError(f"handle sheet {k} is not glued")

    def compile(self):
        """Cut every sheet into trapezoids and glue them; returns a ``Compiled``."""
        self.validate()
        return _compile(self)


def _illegal_overlap(s1: Slit, s2: Slit) -> bool:
    if not _segments_cross(s1.start, s1.end, s2.start, s2.end):
        return False
    shared = {s1.start, s1.end} & {s2.start, s2.end}
    if len(shared) != 1:
        return True
    x = shared.pop()
    u = (s1.end if s1.start == x else s1.start) - x
    w = (s2.end if s2.start == x else s2.start) - x
    if qsign(det2(u, w)) == 0:
        return qsign(dot(u, w)) > 0
    return False


def glue_handle_slit(diagram: SlitDiagram, p, handle, reverse: bool = False, tag: str = "",
                     handle_index: Optional[int] = None) -> SlitDiagram:
    """Slit the base along ``[p, p + a]`` (``[p - a, p]`` if ``reverse``) and glue the
    parallelogram of ``handle = (a, b)`` to its banks."""
    a, b = (PlanePoint.coerce(z) for z in handle)
    p = PlanePoint.coerce(p)
    if qsign(det2(a, b)) <= 0:
        raise BuilderPreconditionError("handle parallelogram needs det(a, b) > 0")
    start = p - a if reverse else p
    idx = handle_index if handle_index is not None else len(diagram.sheets) + 1
    diagram, k = diagram.add_slit(Slit(0, start, a, tag or f"h{idx}"))
    diagram, sh = diagram.add_sheet(Sheet(a, b, HANDLE, idx))
    return diagram.add_group([("slit", k), ("sheet", sh)])


def fit_vector(direction: PlanePoint, a: PlanePoint, b: PlanePoint, bound=Fraction(1, 2)) -> PlanePoint:
    """Largest ``direction / 2^j`` whose (a, b)-coordinates are at most ``bound``."""
    direction = PlanePoint.coerce(direction)
    sh = Sheet(a, b, TORUS, 0)
    w = direction
    for _ in range(200):
        s, t = sh.coords(w)
        if abs(s) <= bound and abs(t) <= bound:
            return w
        w = w / 2
    raise PackingError("cannot shrink the odd slit into its torus")


def glue_odd_slit(diagram: SlitDiagram, p, handle, w=None, tag: str = "",
                  handle_index: Optional[int] = None) -> SlitDiagram:
    """Slit the base along ``[p, p + w]`` and a new torus ``handle = (a, b)`` along a
    translate of the same segment, then cross-glue the two slits."""
    a, b = (PlanePoint.coerce(z) for z in handle)
    p = PlanePoint.coerce(p)
    if qsign(det2(a, b)) <= 0:
        raise BuilderPreconditionError("torus parallelogram needs det(a, b) > 0")
    if w is None:
        w = fit_vector(PlanePoint(1, 0), a, b)
        w = fit_vector(w, diagram.base.a, diagram.base.b, Fraction(1, 8))
    w = PlanePoint.coerce(w)
    idx = handle_index if handle_index is not None else len(diagram.sheets) + 1
    diagram, k0 = diagram.add_slit(Slit(0, p, w, tag or f"o{idx}"))
    diagram, sh = diagram.add_sheet(Sheet(a, b, TORUS, idx))
    center = (a + b) / 2
    diagram, k1 = diagram.add_slit(Slit(sh, center - w / 2, w, (tag or f"o{idx}") + "'"))
    return diagram.add_group([("slit", k0), ("slit", k1)])


# -- compilation ---------------------------------------------------------------------

_TILTS = [Fraction(1, 8), Fraction(-1, 8), Fraction(1, 5), Fraction(-1, 5), Fraction(1, 3),
          Fraction(-1, 3), Fraction(1, 7), Fraction(-1, 7), Fraction(2, 9), Fraction(-2, 9)]


@dataclass
class Compiled:
    surface: TranslationSurface
    sheet_curves: list  # per sheet: (a-curve, b-curve) along its bottom and right sides
    piece_sheet: list  # sheet index of each polygon


def _param(S, V, z):
    return dot(z - S, V) / norm_sq(V)


def _compile(dg: SlitDiagram) -> Compiled:
    pieces = []  # (sheet, [vertices], [labels])
    for k, sh in enumerate(dg.sheets):
        slits = [(j, sl) for j, sl in enumerate(dg.slits) if sl.sheet == k]
        pieces.extend(_decompose(k, sh, slits))

    # gluing of carrier sides
    glue = {}

    def link(x, y):
        if x in glue or y in glue:
            raise BuilderPreconditionError(f"carrier side glued twice: {x} / {y}")
        if x[1] != 1 or y[1] != -1:
            raise BuilderPreconditionError("gluing must pair a + side with a - side")
        glue[x], glue[y] = y, x

    cuts = set()
    for _, _, labels in pieces:
        for lab in labels:
            if lab[0][0] == "cut":
                cuts.add(lab[0])
    for c in sorted(cuts, key=repr):
        link((c, 1), (c, -1))
    for k, sh in enumerate(dg.sheets):
        side = lambda n: ("side", k, n)
        link((side("B1"), 1), (side("B0"), -1))
        if sh.kind == TORUS:
            link((side("A0"), 1), (side("A1"), -1))

    def plus(ref):
        return (("slit", ref[1]), 1) if ref[0] == "slit" else (("side", ref[1], "A0"), 1)

    def minus(ref):
        return (("slit", ref[1]), -1) if ref[0] == "slit" else (("side", ref[1], "A1"), -1)

    for grp in dg.groups:
        r = len(grp)
        for i in range(r):
            link(plus(grp[i]), minus(grp[(i + 1) % r]))

    # breakpoints shared by glued sides
    breaks = {}
    for _, _, labels in pieces:
        for key, sd, l0, l1, S, V in labels:
            breaks.setdefault((key, sd), set()).update((l0, l1))
    for x, y in list(glue.items()):
        if x not in breaks or y not in breaks:
            raise BuilderPreconditionError(f"glued side {x} or {y} has no edges")
        u = breaks[x] | breaks[y]
        breaks[x], breaks[y] = u, u

    polygons, atoms, piece_sheet = [], {}, []
    for pidx, (k, verts, labels) in enumerate(pieces):
        edges = []
        n = len(verts)
        for e in range(n):
            key, sd, l0, l1, S, V = labels[e]
            inner = sorted((l for l in breaks[(key, sd)] if min(l0, l1) < l < max(l0, l1)),
                           reverse=l1 < l0)
            lams = [l0] + inner + [l1]
            for m in range(len(lams) - 1):
                z0 = verts[e] if m == 0 else S + V * lams[m]
                z1 = verts[(e + 1) % n] if m == len(lams) - 2 else S + V * lams[m + 1]
                lo, hi = min(lams[m], lams[m + 1]), max(lams[m], lams[m + 1])
                atoms[(key, sd, lo, hi)] = (pidx, len(edges))
                edges.append(z1 - z0)
        polygons.append(edges)
        piece_sheet.append(k)

    pairing = {}
    for (key, sd, lo, hi), h in atoms.items():
        if sd != 1:
            continue
        okey, osd = glue[(key, sd)]
        other = atoms.get((okey, osd, lo, hi))
        if other is None:
            raise BuilderPreconditionError(f"no partner for {key} on [{lo}, {hi}]")
        pairing[h] = other
    surf = TranslationSurface(polygons, pairing)

    sheet_curves = []
    for k in range(len(dg.sheets)):
        curves = []
        for name in ("A0", "B1"):
            key = ("side", k, name)
            steps = [atoms[a] for a in sorted((a for a in atoms if a[0] == key and a[1] == 1),
                                              key=lambda a: a[2])]
            curves.append(MarkedCurve(tuple(steps)))
        sheet_curves.append(tuple(curves))
    return Compiled(surf, sheet_curves, piece_sheet)


def _decompose(k: int, sh: Sheet, slits):
    """Vertical decomposition of one sheet along a cut direction c = b + r a."""
    a, b = sh.a, sh.b
    for r in _TILTS:
        c = b + a * r
        if all(qsign(det2(sl.vector, c)) != 0 for _, sl in slits):
            break
    else:
        raise PackingError(f"no admissible cut direction in sheet {k}")
    D = det2(a, c)

    def st(z):
        return det2(z, c) / D, det2(a, z) / D

    def pt(s, t):
        return a * s + c * t

    carriers = [
        (("side", k, "A0"), PlanePoint(0, 0), a),
        (("side", k, "A1"), b, a),
        (("side", k, "B0"), PlanePoint(0, 0), b),
        (("side", k, "B1"), a, b),
    ] + [(("slit", j), sl.start, sl.vector) for j, sl in slits]
    segs = []
    for key, S, V in carriers:
        s0, t0 = st(S)
        s1, t1 = st(S + V)
        segs.append((key, S, V, s0, t0, s1, t1))

    xs = sorted({x for sg in segs for x in (sg[3], sg[5])})
    out = []

    def t_at(sg, s):
        _, _, _, s0, t0, s1, t1 = sg
        if s1 == s0:
            return None
        return t0 + (t1 - t0) * (s - s0) / (s1 - s0)

    for sl_, sr in zip(xs, xs[1:]):
        mid = (sl_ + sr) / 2
        cover = [sg for sg in segs
                 if sg[3] != sg[5] and min(sg[3], sg[5]) <= sl_ and max(sg[3], sg[5]) >= sr]
        cover.sort(key=lambda sg: t_at(sg, mid))
        if len(cover) < 2 or cover[0][0][0] != "side" or cover[-1][0][0] != "side":
            raise PackingError(f"sheet {k}: slit reaches the sheet boundary")
        for lo, hi in zip(cover, cover[1:]):
            tl0, tl1 = t_at(lo, sl_), t_at(lo, sr)
            th0, th1 = t_at(hi, sl_), t_at(hi, sr)
            verts = [pt(sl_, tl0), pt(sr, tl1)]
            labels = [(lo[0], None, pt(sl_, tl0), pt(sr, tl1), lo[1], lo[2])]
            if th1 != tl1:
                verts.append(pt(sr, th1))
                labels.append((("cut", k, sr), 1, tl1, th1, a * sr, c))
            verts.append(pt(sr, th1) if th1 == tl1 else None)
            verts = [v for v in verts if v is not None]
            labels.append((hi[0], None, pt(sr, th1), pt(sl_, th0), hi[1], hi[2]))
            verts.append(pt(sl_, th0))
            if th0 != tl0:
                labels.append((("cut", k, sl_), -1, th0, tl0, a * sl_, c))
            # rebuild vertex list in label order
            vs, labs = [], []
            for lab in labels:
                key, sd, l0, l1, S, V = lab
                if sd is None:
                    z0, z1 = l0, l1
                    l0, l1 = _param(S, V, z0), _param(S, V, z1)
                    sd = 1 if l1 > l0 else -1
                else:
                    z0 = S + V * l0
                vs.append(z0)
                labs.append((key, sd, l0, l1, S, V))
            out.append((k, vs, labs))
    return out


# -- marked bases ----------------------------------------------------------------------

def _sheet_basis(comp: Compiled, dg: SlitDiagram, g: int) -> list:
    by_handle = {}
    for k, sh in enumerate(dg.sheets):
        by_handle[sh.handle] = comp.sheet_curves[k]
    if sorted(by_handle) != list(range(1, g + 1)):
        raise BuilderPreconditionError(f"sheets carry handles {sorted(by_handle)}, expected 1..{g}")
    out = []
    for j in range(1, g + 1):
        a, b = by_handle[j]
        out += [a.renamed(f"a{j}"), b.renamed(f"b{j}")]
    return out


@dataclass
class RealizationCertificate:
    chi_original: PeriodVector
    A: GLPlus
    gamma: SpMatrix
    chi_prime: PeriodVector
    partition: Partition
    surface: TranslationSurface
    marked_basis: list
    diagram: Optional[SlitDiagram] = field(default=None, compare=False, repr=False)

    def to_text(self) -> str:
        return (
            "CERTIFICATE 1\n"
            f"partition {self.partition}\n"
            f"chi\n{self.chi_original.to_text()}"
            f"A\n{self.A.to_text()}"
            f"gamma\n{self.gamma.to_text()}"
            f"chi_prime\n{self.chi_prime.to_text()}"
            f"surface\n{self.surface.to_text(self.marked_basis)}"
        )

    @classmethod
    def from_text(cls, text: str, check: bool = False) -> "RealizationCertificate":
        lines = text.strip().splitlines()
        if not lines or lines[0].strip() != "CERTIFICATE 1":
            raise ValueError("line 1: expected 'CERTIFICATE 1'")
        head = lines[1].split()
        if len(head) != 2 or head[0] != "partition":
            raise ValueError("line 2: expected 'partition n1,n2,...'")
        marks = {}
        for k, ln in enumerate(lines):
            if ln.strip() in ("chi", "A", "gamma", "chi_prime", "surface") and ln.strip() not in marks:
                marks[ln.strip()] = k
        missing = {"chi", "A", "gamma", "chi_prime", "surface"} - set(marks)
        if missing:
            raise ValueError(f"certificate lacks sections {sorted(missing)}")

        def block(name, nxt):
            return "\n".join(lines[marks[name] + 1:marks[nxt] if nxt else None])

        chi = PeriodVector.from_text(block("chi", "A"))
        A = GLPlus.from_text(block("A", "gamma"), check=False)
        gamma = SpMatrix.from_text(block("gamma", "chi_prime"), check=False)
        chi_p = PeriodVector.from_text(block("chi_prime", "surface"))
        surf, curves = TranslationSurface.from_text(block("surface", None), check=check)
        part = Partition(tuple(int(x) for x in head[1].split(",") if x), chi_p.genus)
        return cls(chi, A, gamma, chi_p, part, surf, curves)


def _certificate(chi_prime, part, surf, marked, diagram=None) -> RealizationCertificate:
    g = chi_prime.genus
    return RealizationCertificate(chi_prime, GLPlus.identity(), SpMatrix.identity(g), chi_prime,
                                  part, surf, marked, diagram)


def _check_built(comp: Compiled, chi_prime: PeriodVector, part: Partition):
    g = surface_genus(comp.surface)
    if g != chi_prime.genus:
        raise AssertionError(f"built surface has genus {g}, expected {chi_prime.genus}")
    st = stratum(comp.surface)
    if st != part:
        raise AssertionError(f"built surface lies in H({st}), expected H({part})")


# -- generic and genus-2 constructions ---------------------------------------------------------

def _groups_for(part: Partition):
    """('even', n) for even zeros, ('odd', x, y) for consecutive odd zeros."""
    evens = [n for n in part.parts if n % 2 == 0]
    odds = [n for n in part.parts if n % 2]
    groups = [("even", n) for n in evens]
    groups += [("odd", odds[i], odds[i + 1]) for i in range(0, len(odds), 2)]
    return groups


def builder_M(part: Partition) -> int:
    """Scale used with the generic-form predicate: one share of the base per group."""
    return max(1, len(_groups_for(part)))


_W_DIRECTIONS = [PlanePoint(1, 0), PlanePoint(3, 1), PlanePoint(3, -1), PlanePoint(1, 3),
                 PlanePoint(-1, 3), PlanePoint(0, 1), PlanePoint(2, 1), PlanePoint(1, 2)]


def _group_layout(chi: PeriodVector, grp, handles):
    """Slits of one group relative to its anchor 0, in plane coordinates.

    Returns a list of (kind, offset, handle index, reverse) records and the odd vector.
    """
    if grp[0] == "even":
        hs = handles
        for j in hs:
            for k in hs:
                if j < k and same_direction(chi.a(j), chi.a(k)):
                    raise PackingError(f"handles {j} and {k} have parallel slits at one point")
        return [("handle", PlanePoint(0, 0), j, False) for j in hs], None
    _, x, y = grp
    lx, ly = (x - 1) // 2, (y - 1) // 2
    hp, hq, m = handles[:lx], handles[lx:lx + ly], handles[lx + ly]
    star = hp + hq
    for w0 in _W_DIRECTIONS:
        if all(qsign(dot(chi.a(j), w0)) != 0 for j in star):
            break
    else:
        raise PackingError("no direction for the odd slit")
    w = fit_vector(w0, chi.a(m), chi.b(m))
    w = fit_vector(w, chi.a(1), chi.b(1), Fraction(1, 16))
    recs = []
    dirs_p, dirs_q = [], []
    for j in hp:
        rev = qsign(dot(chi.a(j), w)) > 0  # point away from the other end
        recs.append(("handle", PlanePoint(0, 0), j, rev))
        dirs_p.append(-chi.a(j) if rev else chi.a(j))
    for j in hq:
        rev = qsign(dot(chi.a(j), w)) < 0
        recs.append(("handle", w, j, rev))
        dirs_q.append(-chi.a(j) if rev else chi.a(j))
    for dirs in (dirs_p, dirs_q):
        for i in range(len(dirs)):
            for k in range(i + 1, len(dirs)):
                if same_direction(dirs[i], dirs[k]):
                    raise PackingError("two slits of one starfish point the same way")
    recs.append(("odd", PlanePoint(0, 0), m, False))
    return recs, w


def plan_slits(chi: PeriodVector, part: Partition) -> SlitDiagram:
    """Starfish layout for a character whose handles all have positive determinant."""
    g = chi.genus
    if part.genus != g:
        raise BuilderPreconditionError(f"partition genus {part.genus} != character genus {g}")
    for i in range(1, g + 1):
        if qsign(chi.handle_det(i)) <= 0:
            raise BuilderPreconditionError(f"handle {i} has non-positive determinant")
    base = Sheet(chi.a(1), chi.b(1), TORUS, 1)
    groups = _groups_for(part)
    nxt = 2
    layouts = []
    for grp in groups:
        need = grp[1] // 2 if grp[0] == "even" else (grp[1] + grp[2]) // 2
        hs = list(range(nxt, nxt + need))
        nxt += need
        recs, w = _group_layout(chi, grp, hs)
        pts = [PlanePoint(0, 0)]
        for kind, off, j, rev in recs:
            if kind == "handle":
                pts += [off, off - chi.a(j) if rev else off + chi.a(j)]
            else:
                pts += [w]
        st = [base.coords(z) for z in pts]
        box = (min(s for s, _ in st), max(s for s, _ in st), min(t for _, t in st), max(t for _, t in st))
        layouts.append((grp, recs, w, box))
    if nxt != g + 1:
        raise BuilderPreconditionError(f"partition {part} uses {nxt - 2} handles, genus {g} has {g - 1}")

    anchors = _pack([lay[3] for lay in layouts])
    dg = SlitDiagram((base,))
    for (grp, recs, w, _), (s0, t0) in zip(layouts, anchors):
        p = base.point(s0, t0)
        for kind, off, j, rev in recs:
            if kind == "handle":
                dg = glue_handle_slit(dg, p + off, (chi.a(j), chi.b(j)), reverse=rev,
                                      tag=f"h{j}", handle_index=j)
            else:
                dg = glue_odd_slit(dg, p, (chi.a(j), chi.b(j)), w=w, tag=f"o{j}", handle_index=j)
    dg.validate()
    return dg


def _pack(boxes):
    """Anchors (s, t) putting each box [s-, s+] x [t-, t+] inside the open unit square,
    in a row or a column, with positive gaps."""
    n = len(boxes)
    if n == 0:
        return []
    widths = [b[1] - b[0] for b in boxes]
    heights = [b[3] - b[2] for b in boxes]
    W = sum(widths, QuadElem(0))
    H = sum(heights, QuadElem(0))
    if W < 1 and max(heights) < 1:
        gap = (1 - W) / (n + 1)
        out, cur = [], gap
        for b, w, h in zip(boxes, widths, heights):
            out.append((cur - b[0], (1 - h) / 2 - b[2]))
            cur = cur + w + gap
        return out
    if H < 1 and max(widths) < 1:
        gap = (1 - H) / (n + 1)
        out, cur = [], gap
        for b, w, h in zip(boxes, widths, heights):
            out.append(((1 - w) / 2 - b[0], cur - b[2]))
            cur = cur + h + gap
        return out
    worst = max(range(n), key=lambda i: max(widths[i], heights[i]))
    raise PackingError(f"slit groups do not fit in the base (largest is group {worst})")


def packable(chi: PeriodVector, part: Partition) -> bool:
    try:
        plan_slits(chi, part)
        return True
    except (PackingError, BuilderPreconditionError):
        return False


def _build_from_plan(chi_prime: PeriodVector, part: Partition) -> RealizationCertificate:
    dg = plan_slits(chi_prime, part)
    comp = dg.compile()
    _check_built(comp, chi_prime, part)
    marked = _sheet_basis(comp, dg, chi_prime.genus)
    return _certificate(chi_prime, part, comp.surface, marked, dg)


def build_generic(chi_prime: PeriodVector, part: Partition) -> RealizationCertificate:
    if part.genus != chi_prime.genus:
        raise BuilderPreconditionError(f"partition genus {part.genus} != character genus {chi_prime.genus}")
    M = builder_M(part)
    if not generic_form_check(chi_prime, M):
        raise BuilderPreconditionError(f"character is not in generic form at M = {M}")
    return _build_from_plan(chi_prime, part)


def build_genus2(chi_prime: PeriodVector, part: Partition) -> RealizationCertificate:
    if chi_prime.genus != 2:
        raise BuilderPreconditionError("build_genus2 needs genus 2")
    if part.parts not in ((2,), (1, 1)):
        raise BuilderPreconditionError(f"genus 2 strata are (2) and (1,1), got {part}")
    if chi_prime.a(1) != PlanePoint(1, 0) or chi_prime.b(1) != I:
        raise BuilderPreconditionError("handle 1 must be (1, i)")
    if not norm_sq(chi_prime.a(2)) < 1:
        raise BuilderPreconditionError("|a2| >= 1: no room for the slit")
    if qsign(chi_prime.handle_det(2)) <= 0:
        raise BuilderPreconditionError("det(a2, b2) must be positive")
    return _build_from_plan(chi_prime, part)


# -- lattice constructions -----------------------------------------------------------------

def _lattice_rows(part: Partition):
    """Rows of horizontal slits for a lattice layout.

    Each row is a list of gluing groups; a group is (length, [x offsets]).  An even
    zero n gets unit slits at offsets 0, 1, 3, ..., n - 1 (one cone point of order
    n).  A pair of odd zeros x <= y gets x + 1 half-unit slits at offsets 0..x
    (two points of order x) followed, when y > x, by unit slits starting at the
    right end of the last one (raising that point to order y).
    """
    rows = []
    evens = [n for n in part.parts if n % 2 == 0]
    odds = sorted(n for n in part.parts if n % 2)
    for n in evens:
        rows.append([(Fraction(1), [0] + list(range(1, n, 2)))])
    for i in range(0, len(odds), 2):
        x, y = odds[i], odds[i + 1]
        row = [(Fraction(1, 2), list(range(x + 1)))]
        if y > x:
            q = (y - x) // 2
            start = Fraction(2 * x + 1, 2)
            row.append((Fraction(1), [start] + [start + o for o in range(1, 2 * q, 2)]))
        rows.append(row)
    return rows


def _lattice_diagram(p: int, part: Partition) -> SlitDiagram:
    rows = _lattice_rows(part)
    base = Sheet(PlanePoint(p, 0), I, TORUS, 1)
    dg = SlitDiagram((base,))
    R = len(rows)
    for r, row in enumerate(rows):
        height = Fraction(r + 1, R + 1)
        x0 = Fraction(1, 4)
        for length, offs in row:
            refs = []
            for o in offs:
                dg, k = dg.add_slit(Slit(0, PlanePoint(x0 + o, height), PlanePoint(length, 0), f"r{r}"))
                refs.append(("slit", k))
            dg = dg.add_group(refs)
    dg.validate()
    return dg


def _lattice_certificate(chi_prime: PeriodVector, part: Partition, m) -> RealizationCertificate:
    p = chi_prime.a(1).re
    if not p.is_integer():
        raise BuilderPreconditionError("chi'(a1) must be a positive integer")
    dg = _lattice_diagram(int(p.p), part)
    comp = dg.compile()
    _check_built(comp, chi_prime, part)
    s = comp.surface
    loops = homology_loops(s)
    P = np.array(symplectic_coefficients(intersection_matrix(s, loops)), dtype=object)
    loop_periods = [period(s, c) for c in loops]
    pers = []
    for row in P:
        z = PlanePoint(0, 0)
        for c, w in zip(row, loop_periods):
            if c:
                z = z + w * int(c)
        pers.append(z)
    nf = lattice_normal_form(PeriodVector(chi_prime.genus, tuple(pers)), m)
    if nf.A != GLPlus.identity() or nf.chi_prime != chi_prime:
        raise AssertionError(f"surface periods normalize to {nf.chi_prime}, not {chi_prime}")
    C = nf.gamma.m.dot(P)
    names = [f"{ab}{i + 1}" for i in range(chi_prime.genus) for ab in "ab"]
    marked = [_combine(s, loops, row, nm) for row, nm in zip(C, names)]
    return _certificate(chi_prime, part, s, marked, dg)


def _check_lattice_form(chi_prime: PeriodVector, tail):
    g = chi_prime.genus
    p = chi_prime.a(1).re
    if chi_prime.a(1).im or not p.is_integer() or chi_prime.b(1) != I:
        raise BuilderPreconditionError("expected chi'(a1) = p (integer), chi'(b1) = i")
    want = []
    for mi in tail:
        want += [PlanePoint(mi, 0), PlanePoint(0, 0)]
    if list(chi_prime.entries[2:]) != want:
        raise BuilderPreconditionError(f"character is not in the lattice normal form {want}")
    return int(p.p)


def build_lattice_multi(chi_prime: PeriodVector, part: Partition) -> RealizationCertificate:
    g = chi_prime.genus
    if part.genus != g:
        raise BuilderPreconditionError(f"partition genus {part.genus} != character genus {g}")
    if len(part) < 2:
        raise BuilderPreconditionError("build_lattice_multi needs at least two zeros")
    p = _check_lattice_form(chi_prime, [1] * (g - 1))
    if p < part.top + 1:
        raise BuilderPreconditionError(f"volume {p} < n_k + 1 = {part.top + 1}")
    return _lattice_certificate(chi_prime, part, None)


def build_lattice_minimal(chi_prime: PeriodVector, g: int) -> RealizationCertificate:
    if chi_prime.genus != g or g < 2:
        raise BuilderPreconditionError(f"character genus {chi_prime.genus}, requested {g}")
    p = _check_lattice_form(chi_prime, [1] + [2] * (g - 2))
    if p < 2 * g - 1:
        raise BuilderPreconditionError(f"volume {p} < 2g - 1 = {2 * g - 1}")
    part = Partition((2 * g - 2,), g)
    return _lattice_certificate(chi_prime, part, [2] * (g - 2))


# -- dispatcher ---------------------------------------------------------------------------------

def realize(chi: PeriodVector, part: Partition, M=None, max_steps: int = 200, seed: int = 0):
    """Certificate, ``NotRealizable`` or ``HeuristicExhausted``."""
    if part.genus != chi.genus:
        raise ValueError(f"partition genus {part.genus} != character genus {chi.genus}")
    if chi.genus < 2:
        raise ValueError("strata H(n_1, ..., n_k) need genus >= 2")
    verdict = decide(chi, part)
    if isinstance(verdict, NotRealizable):
        return verdict
    g = chi.genus
    if verdict.image.is_lattice:
        if len(part) == 1:
            nf = lattice_normal_form(chi, [2] * (g - 2))
            cert = build_lattice_minimal(nf.chi_prime, g)
        else:
            nf = lattice_normal_form(chi)
            cert = build_lattice_multi(nf.chi_prime, part)
    elif g == 2:
        nf = genus2_normalize(chi)
        cert = build_genus2(nf.chi_prime, part)
    else:
        Mv = builder_M(part) if M is None else M
        nf = generic_normalize_heuristic(chi, Mv, max_steps=max_steps, seed=seed,
                                         accept=lambda c: packable(c, part))
        if nf is None:
            return HeuristicExhausted(max_steps, seed)
        cert = _build_from_plan(nf.chi_prime, part)
    cert.chi_original = chi
    cert.A = nf.A
    cert.gamma = nf.gamma
    return cert


# -- pictures ------------------------------------------------------------------------------------

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _svg_doc(items, xmin, ymin, xmax, ymax, scale=80.0) -> str:
    w, h = (xmax - xmin) * scale + 40, (ymax - ymin) * scale + 40

    def X(x):
        return f"{(x - xmin) * scale + 20:.3f}"

    def Y(y):
        return f"{(ymax - y) * scale + 20:.3f}"

    body = []
    for kind, pts, color, width in items:
        coords = " ".join(f"{X(x)},{Y(y)}" for x, y in pts)
        if kind == "poly":
            body.append(f'<polygon points="{coords}" fill="#f4f4f4" stroke="{color}" stroke-width="{width}"/>')
        else:
            body.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"/>')
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}">\n'
            + "\n".join(body) + "\n</svg>\n")


def diagram_svg(dg: SlitDiagram) -> str:
    """Sheets side by side, slits colored by gluing group."""
    items = []
    shift = 0.0
    offsets = []
    xs, ys = [], []
    for sh in dg.sheets:
        corners = [PlanePoint(0, 0), sh.a, sh.a + sh.b, sh.b]
        cs = [z.approx() for z in corners]
        lo = min(c.real for c in cs)
        off = shift - lo
        offsets.append(off)
        pts = [(c.real + off, c.imag) for c in cs]
        items.append(("poly", pts, "#444444", 1))
        xs += [p[0] for p in pts]
        ys += [p[1] for p in pts]
        shift = max(p[0] for p in pts) + 0.5
    color_of = {}
    for gi, grp in enumerate(dg.groups):
        for ref in grp:
            color_of[ref] = _COLORS[gi % len(_COLORS)]
    for k, sl in enumerate(dg.slits):
        z0, z1 = sl.start.approx(), sl.end.approx()
        off = offsets[sl.sheet]
        items.append(("line", [(z0.real + off, z0.imag), (z1.real + off, z1.imag)],
                      color_of.get(("slit", k), "#000000"), 3))
    for k, sh in enumerate(dg.sheets):
        if ("sheet", k) in color_of:
            z0, z1 = PlanePoint(0, 0).approx(), sh.a.approx()
            off = offsets[k]
            items.append(("line", [(z0.real + off, z0.imag), (z1.real + off, z1.imag)], color_of[("sheet", k)], 3))
    return _svg_doc(items, min(xs), min(ys), max(xs), max(ys))


def surface_svg(s: TranslationSurface) -> str:
    """Polygons side by side; both copies of a glued edge share a color."""
    items = []
    shift = 0.0
    xs, ys = [], []
    color = {}
    for n, h in enumerate(sorted(h for h in s.pairing if h < s.pairing[h])):
        color[h] = color[s.pairing[h]] = _COLORS[n % len(_COLORS)]
    for p, poly in enumerate(s.polygons):
        pts, z = [], PlanePoint(0, 0)
        for v in poly:
            pts.append(z.approx())
            z = z + v
        lo = min(c.real for c in pts)
        off = shift - lo
        P = [(c.real + off, c.imag) for c in pts]
        items.append(("poly", P, "#999999", 0.5))
        for i in range(len(P)):
            items.append(("line", [P[i], P[(i + 1) % len(P)]], color[(p, i)], 2))
        xs += [q[0] for q in P]
        ys += [q[1] for q in P]
        shift = max(q[0] for q in P) + 0.3
    return _svg_doc(items, min(xs), min(ys), max(xs), max(ys))
