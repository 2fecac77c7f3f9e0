import math

import numpy as np
import pytest

from kgchain import (
    SeedPoly,
    cyclic_shift,
    field_norm,
    field_seed,
    left_align,
    poisson_bracket,
    poly_norm,
    realize,
    seed_bracket,
    symmetric_align,
    symmetric_parts,
)
from kgchain.cyclic import CyclicFn, FieldSeed, bind, field_norm_decay_bound
from kgchain.chainpoly import decay_decompose, fit_decay

from conftest import random_homogeneous, random_seed_poly
from oracles import from_seedpoly, p_max_diff, p_poisson, p_realize


def test_shift_orientation_example():
    f = SeedPoly.term([(0, 1, 0), (1, 0, 1)], 1.0, n=4)
    shifted = cyclic_shift(f, 1)
    assert shifted.coeff([(3, 1, 0), (0, 0, 1)]) == 1.0


def test_shift_group_order(rng):
    f = random_seed_poly(rng, n=5)
    g = f
    for _ in range(5):
        g = cyclic_shift(g, 1)
    assert g.max_coeff_diff(f) == 0.0
    const = SeedPoly.term([], 3.0, n=5)
    assert cyclic_shift(const, 1).max_coeff_diff(const) == 0.0


def test_realize_examples():
    h = SeedPoly.term([(0, 2, 0)], 0.5, n=3) + \
        SeedPoly.term([(0, 0, 2)], 0.5, n=3)
    full = realize(h, 3)
    for j in range(3):
        assert full.coeff([(j, 2, 0)]) == 0.5
        assert full.coeff([(j, 0, 2)]) == 0.5
    # wrap-around doubling at N = 2
    pair = SeedPoly.term([(0, 1, 0), (1, 1, 0)], 1.0, n=2)
    assert realize(pair, 2).coeff([(0, 1, 0), (1, 1, 0)]) == 2.0


def test_realize_matches_oracle(rng):
    for n in (3, 5):
        f = random_seed_poly(rng, n=n)
        assert p_max_diff(from_seedpoly(realize(f, n), n),
                          p_realize(from_seedpoly(f, n), n)) <= 1e-13


def test_realize_cap():
    f = SeedPoly.term([(0, 1, 0)], 1.0, n=20)
    with pytest.raises(ValueError):
        realize(f, 20)
    assert realize(CyclicFn(SeedPoly.term([(0, 1, 0)], 1.0, n=4), 4), None) \
        .num_terms() == 4


def test_seed_bracket_disjoint_supports():
    # single-site x-only seeds bracket to zero at every shift
    f = SeedPoly.term([(0, 2, 0)], 1.0, n=6)
    g = SeedPoly.term([(0, 3, 0)], 1.0, n=6)
    assert seed_bracket(f, g, 6).is_zero()


def test_seed_bracket_equivalence(rng):
    for n in (4, 5, 6):
        for _ in range(20):
            f = random_seed_poly(rng, n=n)
            g = random_seed_poly(rng, n=n)
            lhs = realize(seed_bracket(f, g, n), n)
            rhs = poisson_bracket(realize(f, n), realize(g, n))
            assert lhs.max_coeff_diff(rhs) <= 1e-12


def test_seed_bracket_h_omega_zeta0_commute():
    from kgchain import linear_normalize
    lnf = linear_normalize(0.05, 8)
    br = seed_bracket(lnf.h_omega, lnf.zeta0, 8)
    assert realize(br, 8).max_abs_coeff() <= 1e-13


def test_seed_bracket_norm_extensive(rng):
    f = random_seed_poly(rng, max_sites=3)
    g = random_seed_poly(rng, max_sites=3)
    norms = [poly_norm(seed_bracket(bind(f, n), bind(g, n), n), 1.0)
             for n in (8, 16, 32)]
    assert max(norms) - min(norms) <= 1e-14 * max(norms)


def test_symmetric_align_example():
    f = SeedPoly.term([(0, 1, 0), (3, 1, 0)], 1.0, n=8)
    sa = symmetric_align(f)
    assert realize(sa, 8).max_coeff_diff(realize(f, 8)) <= 1e-14
    parts = symmetric_parts(f)
    assert list(parts) == [3]


def test_symmetric_align_realization(rng):
    for _ in range(10):
        f = random_seed_poly(rng, n=8, max_sites=8)
        assert realize(symmetric_align(f), 8).max_coeff_diff(
            realize(f, 8)) <= 1e-13


def test_symmetric_h1_parts_decay():
    # centred expansion of the transformed quartic keeps the full rate
    from kgchain import linear_normalize
    lnf = linear_normalize(0.05, 16)
    parts = symmetric_parts(lnf.h1, 16)
    prof = fit_decay(parts)
    assert prof.check()
    assert prof.sigma >= lnf.sigma0 - 0.1


def test_field_seed_harmonic():
    omega = 1.3
    h = SeedPoly.term([(0, 2, 0)], 0.5 * omega, n=6) + \
        SeedPoly.term([(0, 0, 2)], 0.5 * omega, n=6)
    fs = field_seed(h)
    assert fs.xq.coeff([(0, 0, 1)]) == pytest.approx(omega)
    assert fs.xp.coeff([(0, 1, 0)]) == pytest.approx(-omega)
    assert field_norm(fs, 2.0) == pytest.approx(2 * omega * 2.0)


def test_field_seed_quartic():
    f = SeedPoly.term([(0, 4, 0)], 0.25, n=6)
    fs = field_seed(f)
    assert fs.xq.is_zero()
    assert field_norm(fs, 2.0) == pytest.approx(2.0 ** 3)


def test_field_shift_law_against_gradient(rng):
    for n in (4, 6):
        f = random_seed_poly(rng, n=n)
        fs = field_seed(f)
        full = realize(f, n)
        for j in range(n):
            assert cyclic_shift(fs.xq, -j).max_coeff_diff(
                full.partial(j, 1)) <= 1e-13
            assert cyclic_shift(fs.xp, -j).max_coeff_diff(
                full.partial(j, 0).scaled(-1.0)) <= 1e-13


def test_field_operator_norm_bound(rng):
    # ||X_F(z)|| <= |||X_F|||_1 ||z||^r in both norms
    n = 8
    from kgchain.cyclic import FieldEvaluator
    for _ in range(5):
        deg = int(rng.integers(2, 5))
        f = random_homogeneous(rng, deg, n=n)
        ev = FieldEvaluator(f, n)
        fs = field_seed(f, n)
        fn1 = field_norm(fs, 1.0)
        for _ in range(50):
            z = rng.normal(size=2 * n)
            val = ev(z)
            for norm in (2, np.inf):
                nz = np.linalg.norm(z, norm)
                nv = np.linalg.norm(val, norm)
                assert nv <= fn1 * nz ** (deg - 1) * (1 + 1e-10)


def test_field_norm_decay_bound(rng):
    # class members obey 4 r R^{r-1} C_f / (1-e^-sigma)^2
    n = 12
    f = random_homogeneous(rng, 4, n=n, max_sites=4)
    prof = fit_decay(decay_decompose(f))
    fs = field_seed(f, n)
    for radius in (0.5, 1.0, 2.0):
        bound = field_norm_decay_bound(prof.c, prof.sigma, 4, radius)
        assert field_norm(fs, radius) <= bound * (1 + 1e-12)
