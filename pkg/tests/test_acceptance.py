"""The ten acceptance criteria, each at its stated tolerance and time budget.

Run alone with ``pytest tests/test_acceptance.py -v``; a one-line PASS/FAIL
summary per criterion is printed at the end of the session.
"""
import functools
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE
from helpers import R2, lattice_form, random_dense_chi, random_gl, scramble
from flatperiods.builder import (
    HeuristicExhausted,
    RealizationCertificate,
    builder_M,
    realize,
)
from flatperiods.chi import (
    NotRealizable,
    Partition,
    PeriodVector,
    Realizable,
    all_partitions,
    apply_gl,
    apply_sp,
    cover_data,
    decide,
    image_group,
    volume,
)
from flatperiods.field import I, PlanePoint, QuadElem, det2, norm_sq
from flatperiods.matrices import GLPlus, SpMatrix, standard_J
from flatperiods.sp_action import (
    gauss_bound_holds,
    gauss_reduce,
    generic_form_check,
    generic_normalize_heuristic,
    genus2_normalize,
    lattice_normal_form,
    primitive_to_basis,
)
from flatperiods.surface import (
    TranslationSurface,
    area,
    period,
    stratum,
    verify_certificate,
    vertex_cycles,
)


def criterion(num, name):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException as e:
                ACCEPTANCE[num] = (name, False, f"({type(e).__name__})")
                print(f"criterion {num}: FAIL")
                raise
            dt = time.perf_counter() - t0
            ACCEPTANCE[num] = (name, True, f"({dt:.1f}s)")
            print(f"criterion {num}: PASS ({dt:.1f}s)")
        return run
    return wrap


# -- shared fixtures ----------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def lattice_certificates():
    """Criterion 3 corpus: every partition for g = 2, 3, 4 at p = n_k + 1 and n_k + 3."""
    rng = random.Random(3)
    out = []
    for g in (2, 3, 4):
        for part in all_partitions(g):
            for p in (part.top + 1, part.top + 3):
                ms = [2] * (g - 2) if len(part) == 1 else [1] * (g - 2)
                base = lattice_form(p, [1] + ms)
                chi = scramble(base, rng)
                out.append((chi, part, p, realize(chi, part)))
    return out


@functools.lru_cache(maxsize=None)
def genus2_certificates():
    rng = random.Random(4)
    out = []
    for _ in range(100):
        chi = random_dense_chi(2, rng)
        nf = genus2_normalize(chi)
        certs = [realize(chi, Partition.of(2)), realize(chi, Partition.of(1, 1))]
        out.append((chi, nf, certs))
    return out


@functools.lru_cache(maxsize=None)
def generic_runs():
    rng = random.Random(10)
    out = []
    for g in (3, 3, 3, 4, 4):
        for part in (rng.choice(all_partitions(g)), Partition((2 * g - 2,), g)):
            chi = random_dense_chi(g, rng)
            out.append((chi, part, realize(chi, part, max_steps=200, seed=1)))
    return out


# -- 1 -------------------------------------------------------------------------------------------

def _decision_catalog():
    """(chi, partition, expected verdict) with the image class known by construction."""
    rng = random.Random(1)
    cat = []
    for g in (2, 3, 4):
        for part in all_partitions(g)[:4]:
            nk = part.top
            for p in (nk, nk + 1, 2 * (nk + 1)):
                A = random_gl(rng)
                chi = scramble(lattice_form(p, [1] * (g - 1)), rng, gl=False)
                chi = apply_gl(A, chi)
                # volume p * det A, covolume det A: the bound is p >= n_k + 1
                cat.append((chi, part, p >= nk + 1))
    line = [
        PeriodVector.of(1, 2, 3, 4),
        PeriodVector.of(1, R2, 0, 0),
        PeriodVector.of(I, I * 2, I * R2, 0),
        PeriodVector.of(PlanePoint(1, 1), PlanePoint(2, 2), PlanePoint(R2, R2), 0, 0, 1),
        PeriodVector.of(0, 0, 0, 0),
    ]
    for chi in line:
        cat.append((chi, all_partitions(chi.genus)[0], False))
    for g in (2, 3):
        for _ in range(6):
            chi = random_dense_chi(g, rng)
            part = rng.choice(all_partitions(g))
            cat.append((chi, part, True))
            # swapping a and b of every handle negates the volume
            neg = PeriodVector.of(*[z for i in range(1, g + 1) for z in (chi.b(i), chi.a(i))])
            cat.append((neg, part, False))
    # dense image with zero volume
    cat.append((PeriodVector.of(1, R2, I, I * R2), Partition.of(2), False))
    return cat


@criterion(1, "decision correctness")
def test_criterion_1_decision_catalog():
    cat = _decision_catalog()
    assert len(cat) >= 50
    kinds = {image_group(chi).classification for chi, _, _ in cat}
    assert {"lattice", "line_discrete", "line_dense", "plane_nondiscrete"} <= kinds
    t0 = time.perf_counter()
    for chi, part, expect in cat:
        v = decide(chi, part)
        assert bool(v) == expect, (chi, part)
        assert isinstance(v, Realizable if expect else NotRealizable)
    assert time.perf_counter() - t0 < 1.0
    # both edges of the bound, with a non-unit covolume
    A = GLPlus(2, 1, 0, Fraction(3, 2))
    for part in (Partition.of(2, 2), Partition.of(4)):
        nk = part.top
        hit = apply_gl(A, lattice_form(nk + 1, [1, 1]))
        miss = apply_gl(A, lattice_form(nk, [1, 1]))
        cov = image_group(hit).covolume
        assert cov == 3 and volume(hit) == (nk + 1) * cov
        assert decide(hit, part)
        assert volume(miss) == (nk + 1) * cov - cov
        v = decide(miss, part)
        assert not v and v.deficit == cov


# -- 2 -------------------------------------------------------------------------------------------

@criterion(2, "lattice normal form")
def test_criterion_2_lattice_normal_form():
    rng = random.Random(2)
    t0 = time.perf_counter()
    for _ in range(200):
        g = rng.randint(2, 5)
        p = rng.randint(2, 9)
        ms = [rng.choice([1, 2]) for _ in range(g - 2)]
        target = lattice_form(p, [1] + ms)
        chi = scramble(target, rng)
        res = lattice_normal_form(chi, ms)
        assert res.chi_prime == target
        assert res.gamma.is_symplectic()
        J = standard_J(g)
        assert np.array_equal(res.gamma.m.T.dot(J).dot(res.gamma.m), J)
        assert apply_gl(res.A, apply_sp(res.gamma, chi)) == target
    assert time.perf_counter() - t0 < 10.0


# -- 3 -------------------------------------------------------------------------------------------

@criterion(3, "lattice realization end to end")
def test_criterion_3_lattice_realization():
    t0 = time.perf_counter()
    certs = lattice_certificates()
    for chi, part, p, cert in certs:
        assert isinstance(cert, RealizationCertificate), (chi, part)
        rep = verify_certificate(cert)
        assert rep.ok and len(rep.checks) == 9, (part, p, rep.to_text())
        assert stratum(cert.surface) == part
        assert [period(cert.surface, c) for c in cert.marked_basis] == list(cert.chi_prime)
    assert time.perf_counter() - t0 < 30.0
    # H(2,2) at volume 3: two cone points of angle 6 pi
    cert = realize(lattice_form(3, [1, 1]), Partition.of(2, 2))
    assert sorted(2 * (c.order + 1) for c in vertex_cycles(cert.surface) if c.order) == [6, 6]
    # H(6) at volume 7: one cone point of angle 14 pi
    cert = realize(lattice_form(7, [1, 2, 2]), Partition.of(6))
    assert [2 * (c.order + 1) for c in vertex_cycles(cert.surface) if c.order] == [14]


# -- 4 -------------------------------------------------------------------------------------------

@criterion(4, "genus-2 non-lattice")
def test_criterion_4_genus2():
    t0 = time.perf_counter()
    runs = genus2_certificates()
    assert len(runs) == 100
    for chi, nf, certs in runs:
        d1, d2 = nf.chi_prime.handle_det(1), nf.chi_prime.handle_det(2)
        assert d2 > 0 and 2 * d2 <= d1
        assert nf.recomputes(chi)
        for cert, part in zip(certs, (Partition.of(2), Partition.of(1, 1))):
            assert isinstance(cert, RealizationCertificate)
            assert verify_certificate(cert).ok
            assert stratum(cert.surface) == part
    assert time.perf_counter() - t0 < 60.0


# -- 5 -------------------------------------------------------------------------------------------

def _brute_min_norm(v1, v2, depth=8):
    """Smallest |first vector|^2 over SL2(Z) words of length <= depth in S, T, T^-1."""
    best = v1[0] ** 2 + v1[1] ** 2
    frontier = {(v1, v2)}
    seen = set(frontier)
    for _ in range(depth):
        nxt = set()
        for a, b in frontier:
            for pair in (
                (b, (-a[0], -a[1])),
                (a, (b[0] + a[0], b[1] + a[1])),
                (a, (b[0] - a[0], b[1] - a[1])),
                ((a[0] + b[0], a[1] + b[1]), b),
                ((a[0] - b[0], a[1] - b[1]), b),
            ):
                if pair not in seen:
                    seen.add(pair)
                    nxt.add(pair)
                    best = min(best, pair[0][0] ** 2 + pair[0][1] ** 2)
        frontier = nxt
    return best


@criterion(5, "Gauss reduction bound")
def test_criterion_5_gauss():
    rng = random.Random(5)
    n = 0
    while n < 1000:
        if n % 2:
            v1 = PlanePoint(rng.randint(-30, 30), rng.randint(-30, 30))
            v2 = PlanePoint(rng.randint(-30, 30), rng.randint(-30, 30))
        else:
            v1 = PlanePoint(QuadElem(rng.randint(-9, 9), rng.randint(-9, 9), 2), QuadElem(rng.randint(-9, 9), rng.randint(-9, 9), 2))
            v2 = PlanePoint(QuadElem(rng.randint(-9, 9), rng.randint(-9, 9), 2), QuadElem(rng.randint(-9, 9), rng.randint(-9, 9), 2))
        if det2(v1, v2) == 0:
            continue
        n += 1
        A, w1, w2 = gauss_reduce(v1, v2)
        assert A[0][0] * A[1][1] - A[0][1] * A[1][0] == 1
        assert w1 == v1 * A[0][0] + v2 * A[0][1] and w2 == v1 * A[1][0] + v2 * A[1][1]
        assert 3 * norm_sq(w1) ** 2 <= 4 * det2(w1, w2) ** 2
        assert gauss_bound_holds(w1, w2)
    cases = 0
    while cases < 50:
        a = (rng.randint(-3, 3), rng.randint(-3, 3))
        b = (rng.randint(-3, 3), rng.randint(-3, 3))
        if a[0] * b[1] - a[1] * b[0] == 0:
            continue
        cases += 1
        _, w1, _ = gauss_reduce(PlanePoint(*a), PlanePoint(*b))
        assert norm_sq(w1) == _brute_min_norm(a, b)


# -- 6 -------------------------------------------------------------------------------------------

@criterion(6, "Riemann bilinear identity")
def test_criterion_6_bilinear():
    certs = [c for *_, c in lattice_certificates()]
    certs += [c for *_, pair in genus2_certificates() for c in pair]
    certs += [c for *_, c in generic_runs() if isinstance(c, RealizationCertificate)]
    assert len(certs) >= 240
    for cert in certs:
        pers = [period(cert.surface, c) for c in cert.marked_basis]
        total = sum((det2(pers[i], pers[i + 1]) for i in range(0, len(pers), 2)), QuadElem(0))
        assert total == volume(cert.chi_prime)
        assert total == area(cert.surface)


# -- 7 -------------------------------------------------------------------------------------------

@criterion(7, "cover data")
def test_criterion_7_cover():
    for chi, part, p, cert in lattice_certificates():
        cd = cover_data(cert)
        ratio = volume(chi) / image_group(chi).covolume
        assert ratio.is_integer() and cd.degree == ratio == p
        assert cd.degree >= part.top + 1
        # one covolume below the bound flips the verdict
        base = lattice_form(part.top + 1, [1] * (chi.genus - 1))
        below = lattice_form(part.top, [1] * (chi.genus - 1))
        assert decide(base, part)
        v = decide(below, part)
        assert isinstance(v, NotRealizable) and v.deficit == 1


# -- 8 -------------------------------------------------------------------------------------------

@criterion(8, "Sp transitivity")
def test_criterion_8_primitive():
    rng = random.Random(8)
    n = 0
    while n < 1000:
        g = rng.randint(2, 5)
        u = [rng.randint(-20, 20) for _ in range(2 * g)]
        if np.gcd.reduce([abs(x) for x in u]) != 1:
            continue
        n += 1
        M = primitive_to_basis(u)
        assert M.apply_int(u) == [1] + [0] * (2 * g - 1)
        J = standard_J(g)
        assert np.array_equal(M.m.T.dot(J).dot(M.m), J)


# -- 9 -------------------------------------------------------------------------------------------

def _mutants(cert: RealizationCertificate):
    """(description, mutated certificate, first failing check)."""
    from dataclasses import replace

    s = cert.surface
    g = cert.chi_prime.genus
    out = []

    def with_surface(polys, pairing):
        return replace(cert, surface=TranslationSurface(polys, pairing, check=False))

    m = cert.gamma.m.copy()
    m[0] = m[0] * 2
    out.append(("gamma row scaled", replace(cert, gamma=SpMatrix(m, check=False)), 1))
    m = cert.gamma.m.copy()
    m[[0, 1]] = m[[1, 0]]
    out.append(("gamma rows swapped", replace(cert, gamma=SpMatrix(m, check=False)), 1))
    out.append(("A orientation reversed", replace(cert, A=GLPlus(1, 0, 0, -1, check=False) @ cert.A), 1))
    out.append(("A scaled", replace(cert, A=GLPlus(2, 0, 0, 2) @ cert.A), 2))
    out.append(("chi' entry shifted", replace(cert, chi_prime=cert.chi_prime.replace({1: cert.chi_prime[1] + 1})), 2))
    out.append(("chi entry shifted", replace(cert, chi_original=cert.chi_original.replace({0: cert.chi_original[0] + I})), 2))
    out.append(("gamma replaced by another symplectic matrix",
                replace(cert, gamma=SpMatrix(np.roll(np.identity(2 * g, dtype=int), 2, axis=0).astype(object)) @ cert.gamma), 2))

    # flipped pairing: exchange the partners of two glued pairs
    pairs = sorted((h, k) for h, k in s.pairing.items() if h < k)
    (h1, k1), (h2, k2) = pairs[0], next(pk for pk in pairs[1:] if s.vector(pk[0]) != s.vector(pairs[0][0]))
    pairing = dict(s.pairing)
    pairing.update({h1: k2, k2: h1, h2: k1, k1: h2})
    out.append(("flipped pairing", with_surface(s.polygons, pairing), 3))
    pairing = dict(s.pairing)
    del pairing[h1], pairing[k1]
    out.append(("dropped pairing", with_surface(s.polygons, pairing), 3))
    # shifted slit endpoint: move one polygon vertex, keeping the polygon closed
    polys = [list(p) for p in s.polygons]
    p0 = next(i for i, p in enumerate(polys) if len(p) >= 4)
    polys[p0][0] = polys[p0][0] + PlanePoint(Fraction(1, 64), 0)
    polys[p0][1] = polys[p0][1] - PlanePoint(Fraction(1, 64), 0)
    out.append(("shifted slit endpoint", with_surface(polys, s.pairing), 3))
    polys = [list(p) for p in s.polygons]
    polys[0][0] = polys[0][0] * 2
    out.append(("polygon not closed", with_surface(polys, s.pairing), 3))
    curves = list(cert.marked_basis)
    curves[0] = type(curves[0])(curves[0].steps[:-1] or curves[1].steps[:1], curves[0].name)
    out.append(("marked curve broken open", replace(cert, marked_basis=curves), 3))

    wrong = Partition.of(1, 1) if cert.partition.parts == (2,) else Partition((2 * g - 2,), g)
    out.append(("wrong partition", replace(cert, partition=wrong), 5))
    out.append(("partition with a bigger zero", replace(cert, partition=Partition.of(*([2 * g - 2] if g > 2 else [2]) ) if len(cert.partition) > 1 else Partition.of(*([1] * (2 * g - 2)))), 5))

    curves = list(cert.marked_basis)
    curves[0], curves[1] = curves[1], curves[0]
    out.append(("a1 and b1 swapped", replace(cert, marked_basis=curves), 6))
    curves = list(cert.marked_basis)
    curves[0] = curves[0] + curves[0]
    out.append(("a1 traversed twice", replace(cert, marked_basis=curves), 6))
    curves = list(cert.marked_basis)
    curves[2] = curves[2] + curves[0]
    out.append(("a2 replaced by a2 + a1", replace(cert, marked_basis=curves), 6))
    out.append(("last marked curve dropped", replace(cert, marked_basis=list(cert.marked_basis)[:-1]), 6))
    curves = list(cert.marked_basis)
    curves[2], curves[3] = curves[3], curves[2]
    out.append(("a2 and b2 swapped", replace(cert, marked_basis=curves), 6))

    # consistent (chi, chi') pair that the surface does not realize
    other = cert.chi_prime.replace({2: cert.chi_prime[2] + cert.chi_prime[0]})
    out.append(("chi' not realized by the surface",
                replace(cert, chi_original=other, chi_prime=other, A=GLPlus.identity(), gamma=SpMatrix.identity(g)), 7))
    return out


@criterion(9, "mutation robustness")
def test_criterion_9_mutations():
    cert = realize(scramble(lattice_form(4, [1, 1]), random.Random(9)), Partition.of(1, 1, 2))
    assert verify_certificate(cert).ok
    mutants = _mutants(cert)
    assert len(mutants) == 20
    for desc, bad, check in mutants:
        rep = verify_certificate(bad)
        assert not rep.ok, desc
        assert rep.failed()[0] == check, (desc, rep.to_text())
    # the serialized form fails the same way
    text = cert.to_text().replace("partition 1,1,2", "partition 2,2")
    rep = verify_certificate(RealizationCertificate.from_text(text))
    assert rep.failed() == [5]


# -- 10 ------------------------------------------------------------------------------------------

@criterion(10, "heuristic honesty")
def test_criterion_10_heuristic():
    runs = generic_runs()
    successes = 0
    for chi, part, res in runs:
        assert not isinstance(res, NotRealizable)
        if isinstance(res, RealizationCertificate):
            successes += 1
            assert generic_form_check(res.chi_prime, builder_M(part))
            assert verify_certificate(res).ok
        else:
            assert isinstance(res, HeuristicExhausted)
    assert successes > 0
    # worked example and forced exhaustion
    chi = PeriodVector.of(10, I * 10, 1, I, 1 + R2, I)
    nf = generic_normalize_heuristic(chi, 1, max_steps=200)
    assert nf is not None and generic_form_check(nf.chi_prime, 1) and nf.recomputes(chi)
    bad = PeriodVector.of(1, I, 1, I, 1 + R2, I)  # equal directions, fails the check
    assert not generic_form_check(bad, 1)
    assert generic_normalize_heuristic(bad, 1, max_steps=0) is None
    res = realize(bad, Partition.of(4), max_steps=0)
    assert isinstance(res, HeuristicExhausted) and not isinstance(res, NotRealizable)
    assert decide(bad, Partition.of(4))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
