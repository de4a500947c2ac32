"""Shared generators for the test suite."""
import random
from fractions import Fraction

from flatperiods.chi import PeriodVector, apply_gl, apply_sp, volume, image_group
from flatperiods.field import I, PlanePoint, QuadElem
from flatperiods.matrices import GLPlus, SpMatrix
from flatperiods.sp_action import move

R2 = QuadElem(0, 1, 2)


def random_sp(g: int, rng: random.Random, n: int = 12) -> SpMatrix:
    """Product of ``n`` random elementary symplectic moves."""
    M = SpMatrix.identity(g)
    for _ in range(n):
        i = rng.randrange(1, g + 1)
        k = rng.choice([-2, -1, 1, 2])
        kind = rng.randrange(4 if g > 1 else 2)
        if kind == 0:
            E = move(g, **{f"a{i}": {f"a{i}": 1, f"b{i}": k}})
        elif kind == 1:
            E = move(g, **{f"b{i}": {f"b{i}": 1, f"a{i}": k}})
        else:
            j = rng.choice([x for x in range(1, g + 1) if x != i])
            if kind == 2:
                E = move(g, **{f"a{i}": {f"a{i}": 1, f"a{j}": k}, f"b{j}": {f"b{j}": 1, f"b{i}": -k}})
            else:
                E = move(g, **{f"a{i}": {f"a{i}": 1, f"b{j}": k}, f"a{j}": {f"a{j}": 1, f"b{i}": k}})
        M = E @ M
    return M


def random_gl(rng: random.Random) -> GLPlus:
    while True:
        e = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)]
        A = GLPlus(*e, check=False)
        if A.det() > 0:
            return A


def scramble(chi: PeriodVector, rng: random.Random, gl: bool = True) -> PeriodVector:
    out = apply_sp(random_sp(chi.genus, rng), chi)
    return apply_gl(random_gl(rng), out) if gl else out


def lattice_form(p: int, ms) -> PeriodVector:
    ents = [PlanePoint(p, 0), I]
    for m in ms:
        ents += [PlanePoint(m, 0), PlanePoint(0, 0)]
    return PeriodVector.of(*ents)


def random_q2(rng: random.Random, num: int = 6, den: int = 4) -> QuadElem:
    return QuadElem(Fraction(rng.randint(-num, num), rng.randint(1, den)),
                    Fraction(rng.randint(-num, num), rng.randint(1, den)), 2)


def random_dense_chi(g: int, rng: random.Random) -> PeriodVector:
    """Positive volume, non-discrete image, entries in Q(sqrt 2)."""
    while True:
        chi = PeriodVector.of(*[PlanePoint(random_q2(rng), random_q2(rng)) for _ in range(2 * g)])
        if volume(chi) > 0 and image_group(chi).classification == "plane_nondiscrete":
            return chi
