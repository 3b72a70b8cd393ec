import math

import numpy as np
import pytest

from icgof import datagen as dg
from icgof.errors import InvalidInput

ALL_DISTS = list(dg.ComponentDist)


def test_identity_structure():
    sigma, root = dg.build_cov(dg.CovStructure.preset("I", 5))
    np.testing.assert_array_equal(sigma, np.eye(5))
    np.testing.assert_array_equal(root, np.eye(5))


def test_ar_structure():
    sigma, root = dg.build_cov(dg.CovStructure.preset("II", 3))
    np.testing.assert_allclose(sigma, [[1, 0.3, 0.09], [0.3, 1, 0.3], [0.09, 0.3, 1]], atol=1e-15)
    assert np.linalg.norm(root @ root - sigma) <= 1e-7 * np.linalg.norm(sigma)


def test_spiked_structure_spectrum():
    sigma, root = dg.build_cov(dg.CovStructure(dg.CovKind.SPIKED, 4, exponent=0.25, seed=5))
    lam = np.sort(np.linalg.eigvalsh(sigma))[::-1]
    np.testing.assert_allclose(lam, np.arange(1, 5) ** -0.25, atol=1e-8)
    assert np.linalg.norm(root @ root - sigma) <= 1e-7 * np.linalg.norm(sigma)
    assert np.array_equal(sigma, sigma.T)


def test_spiked_structure_deterministic_per_seed():
    a = dg.build_cov.__wrapped__(dg.CovStructure(dg.CovKind.SPIKED, 6, seed=1))[0]
    b = dg.build_cov.__wrapped__(dg.CovStructure(dg.CovKind.SPIKED, 6, seed=1))[0]
    c = dg.build_cov.__wrapped__(dg.CovStructure(dg.CovKind.SPIKED, 6, seed=2))[0]
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_invalid_ar():
    with pytest.raises(InvalidInput):
        dg.build_cov(dg.CovStructure(dg.CovKind.AR, 3, rho=1.0))


@pytest.mark.parametrize("cd", ALL_DISTS)
def test_component_standardization(cd):
    n = 10**6
    z = dg.draw_components(cd, n, np.random.default_rng(42))
    assert abs(z.mean()) <= 4 / math.sqrt(n)
    assert abs(z.var() - 1) <= 5 / math.sqrt(n)


def test_uniform_support():
    z = dg.draw_components(dg.ComponentDist.UNIFORM, 10**5, np.random.default_rng(0))
    assert np.max(np.abs(z)) <= math.sqrt(3) + 1e-12


def test_gen_null_law_of_large_numbers():
    n = 10**4
    x = dg.gen_null(n, dg.CovStructure.preset("I", 2), dg.ComponentDist.GAUSSIAN, 7)
    assert np.max(np.abs(x.T @ x / n - np.eye(2))) <= 5 / math.sqrt(n)


def test_gen_null_deterministic():
    cs = dg.CovStructure.preset("II", 8)
    a = dg.gen_null(10, cs, dg.ComponentDist.LAPLACE, 123)
    b = dg.gen_null(10, cs, dg.ComponentDist.LAPLACE, 123)
    assert np.array_equal(a, b)


def test_alt_h0_matches_null_moments():
    n, p = 10**4, 5
    cs = dg.CovStructure.preset("II", p)
    alt = dg.gen_alt(n, cs, dg.AltSpec(dg.EtaLaw.POISSON, 0.0), 1)
    null = dg.gen_null(n, cs, dg.ComponentDist.GAUSSIAN, 2)
    tol = 5 / math.sqrt(n)
    assert np.max(np.abs(alt.mean(0) - null.mean(0))) <= 2 * tol
    assert np.max(np.abs(alt.T @ alt / n - null.T @ null / n)) <= 2 * tol * 2


def test_alt_h1_norm_is_eta():
    alt = dg.AltSpec(dg.EtaLaw.SCALED_BETA, g=1.0, c=1.0)
    x = dg.gen_alt(50, dg.CovStructure.preset("I", 30), alt, 9)
    z_ss, u_ss, eta_ss = np.random.SeedSequence(9).spawn(3)
    eta = np.sqrt(dg.eta_squared_draw(dg.EtaLaw.SCALED_BETA, 30, np.random.default_rng(eta_ss), 50))
    np.testing.assert_allclose(np.linalg.norm(x, axis=1), eta, rtol=1e-12)


@pytest.mark.parametrize("law", list(dg.EtaLaw))
def test_alt_second_moment_is_sigma(law):
    n, p = 10**4, 25
    cs = dg.CovStructure.preset("II", p)
    x = dg.gen_alt(n, cs, dg.AltSpec(law, 0.8), 4)
    sigma = dg.build_cov(cs)[0]
    s = x.T @ x / n
    # entrywise sd of X_i X_j averages is below ~sqrt(E X^4) / sqrt(n); allow for heavy eta tails
    assert np.max(np.abs(s - sigma)) <= 5 * math.sqrt(3 * 2) / math.sqrt(n)


def test_alt_spec_multipliers():
    assert dg.AltSpec(dg.EtaLaw.POISSON, 0.5).h == pytest.approx(0.6)
    assert dg.AltSpec(dg.EtaLaw.SCALED_BETA, 0.5).h == pytest.approx(0.5)
    assert dg.AltSpec(dg.EtaLaw.SCALED_F, 0.5).h == pytest.approx(0.15)


def test_scaled_f_needs_p_above_20():
    with pytest.raises(InvalidInput):
        dg.gen_alt(10, dg.CovStructure.preset("I", 20), dg.AltSpec(dg.EtaLaw.SCALED_F, 0.5), 0)
    with pytest.raises(InvalidInput):
        dg.eta_squared_draw(dg.EtaLaw.SCALED_F, 20, 0)


def test_h_out_of_range():
    with pytest.raises(InvalidInput):
        dg.gen_alt(10, dg.CovStructure.preset("I", 30), dg.AltSpec(dg.EtaLaw.POISSON, 0.9), 0)


def test_eta_analytic_means():
    p = 100
    # (p + 4) * (p/2) / (p/2 + 2) and (p - 20) * d2 / (d2 - 2) with d2 = p / 10
    assert (p + 4) * (p / 2) / (p / 2 + 2) == pytest.approx(p)
    assert (p - 20) * (p / 10) / (p / 10 - 2) == pytest.approx(p)


def test_unit_sphere():
    u = dg.unit_sphere(1000, 17, np.random.default_rng(3))
    assert np.max(np.abs(np.linalg.norm(u, axis=1) - 1)) <= 1e-12


@pytest.mark.parametrize("cd", ALL_DISTS)
def test_null_rows_independent_of_call_order(cd):
    cs = dg.CovStructure.preset("III", 10, seed=4)
    first = [dg.gen_null(4, cs, cd, s) for s in range(3)]
    second = [dg.gen_null(4, cs, cd, s) for s in reversed(range(3))][::-1]
    for a, b in zip(first, second):
        assert np.array_equal(a, b)
