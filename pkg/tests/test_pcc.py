import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from paircop import archimedean as ar
from paircop import bicop as bc
from paircop import elliptical as el
from paircop import pcc
from paircop.errors import NoDensityError, ParameterError

from _oracles import grid_tau

R_HALF = np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]])
PARTIAL = el.partial_correlation_matrix(R_HALF, (1, 2), (0,))[0, 1]


def indep3():
    e = lambda: pcc.EdgeSpec("indep", [])
    return pcc.trivariate_pcc((0, 1, 2), e(), e(), e())


def gauss3():
    return pcc.trivariate_pcc(
        (0, 1, 2), pcc.EdgeSpec("gaussian", [0.5]),
        pcc.EdgeSpec("gaussian", [0.5]), pcc.EdgeSpec("gaussian", [PARTIAL]))


def clayton3(theta=2.0):
    return pcc.trivariate_pcc(
        (1, 0, 2), pcc.EdgeSpec("clayton", [theta]),
        pcc.EdgeSpec("clayton", [theta]),
        pcc.EdgeSpec("clayton", [theta / (theta + 1.0)]))


def extended_frank():
    """Figure-3 style spec: Frank pair edges, AMH conditioned edge whose
    parameter follows the conditioning value."""
    return pcc.trivariate_pcc(
        (2, 0, 1), pcc.EdgeSpec("frank", [1.0]),
        pcc.EdgeSpec("frank", [3.0]),
        pcc.EdgeSpec("amh", pcc.ParamFunction.frank_amh_tilt(30.0)))


# ---------------------------------------------------------------------------
# parameter functions
# ---------------------------------------------------------------------------

def test_resolve_edge_params_examples():
    e = pcc.EdgeSpec("clayton", [2.0])
    assert_allclose(pcc.resolve_edge_params(e, ()), [2.0])
    tilt = pcc.EdgeSpec("amh", pcc.ParamFunction.frank_amh_tilt(3.0))
    assert_allclose(pcc.resolve_edge_params(tilt, (0.5,)),
                    [1.0 - np.exp(-1.5)], rtol=1e-12)
    assert_allclose(pcc.resolve_edge_params(tilt, (0.0,)), [0.0])


def test_resolve_edge_params_out_of_range():
    # a tilt that would push gumbel theta below 1 must be rejected
    e = pcc.EdgeSpec("gumbel", pcc.ParamFunction.frank_amh_tilt(3.0))
    with pytest.raises(ParameterError):
        pcc.resolve_edge_params(e, (0.5,))


def test_joint_probability_param_function():
    base = bc.clayton(2.0)
    pf = pcc.ParamFunction.joint_probability(base, [0.0, 1.0], [1.0, 3.0])
    edge = pcc.EdgeSpec("gumbel", pf)
    got = pcc.resolve_edge_params(edge, (0.4, 0.6))
    want = 1.0 + 2.0 * float(bc.cdf(base, 0.4, 0.6))
    assert_allclose(got, [want], rtol=1e-12)
    # single conditioning value short-circuits to the value itself
    got1 = pcc.resolve_edge_params(edge, (0.25,))
    assert_allclose(got1, [1.5])


# ---------------------------------------------------------------------------
# spec construction and serialization
# ---------------------------------------------------------------------------

def test_pcc_spec_validation():
    e = pcc.EdgeSpec("indep", [])
    with pytest.raises(ParameterError):
        pcc.PccSpec(3, (0, 1), {})
    with pytest.raises(ParameterError):
        pcc.PccSpec(3, (0, 1, 2), {(1, 1): e})
    with pytest.raises(ParameterError):
        pcc.PccSpec(3, (0, 0, 2), {(1, 1): e, (1, 2): e, (2, 1): e})


def test_json_roundtrip_matches_wire_schema():
    spec = pcc.trivariate_pcc(
        (1, 0, 2), pcc.EdgeSpec("clayton", [2.0]),
        pcc.EdgeSpec("clayton", [2.0]),
        pcc.EdgeSpec("amh", pcc.ParamFunction.frank_amh_tilt(3.0)))
    d = spec.to_dict()
    assert d["dim"] == 3
    assert d["order"] == [2, 1, 3]
    assert d["edges"][0]["conditioned"] == [2, 1]
    assert d["edges"][0]["conditioning"] == []
    assert d["edges"][0]["params"] == {"constant": [2.0]}
    assert d["edges"][2]["conditioned"] == [1, 3]
    assert d["edges"][2]["conditioning"] == [2]
    assert d["edges"][2]["params"] == {"frank_amh_tilt": {"alpha": 3.0}}
    back = pcc.PccSpec.from_dict(json.loads(json.dumps(d)))
    assert back.order == spec.order
    u = np.array([0.3, 0.5, 0.7])
    assert_allclose(pcc.pcc_density(back, u), pcc.pcc_density(spec, u))


def test_from_dict_field_errors():
    d = {"dim": 3, "order": [2, 1, 3], "edges": [
        {"conditioned": [1, 3], "conditioning": [],
         "family": "clayton", "params": {"constant": [2.0]}}]}
    with pytest.raises(ParameterError):
        pcc.PccSpec.from_dict(d)   # pair must contain the tree root


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def test_density_independence():
    u = np.random.default_rng(0).uniform(0.01, 0.99, (50, 3))
    assert_allclose(pcc.pcc_density(indep3(), u), np.ones(50), atol=1e-14)


def test_density_gaussian_matches_closed_form():
    oracle = el.copula_density_callable(el.gauss_spec(R_HALF))
    u = np.random.default_rng(1).uniform(0.05, 0.95, (10, 3))
    got = pcc.pcc_density(gauss3(), u)
    want = oracle(u[:, 0], u[:, 1], u[:, 2])
    assert np.max(np.abs(got - want)) < 1e-8


def test_density_extended_frank_positive_and_normalized():
    spec = extended_frank()
    u = np.random.default_rng(2).uniform(0.01, 0.99, (200, 3))
    vals = pcc.pcc_density(spec, u)
    assert np.all(vals > 0.0)
    assert abs(pcc.pcc_density_mass(spec) - 1.0) < 1e-3


def test_density_singular_edge_raises():
    spec = pcc.trivariate_pcc(
        (0, 1, 2), pcc.EdgeSpec("cuadrasauge", [0.7]),
        pcc.EdgeSpec("cuadrasauge", [0.3]), pcc.EdgeSpec("cuadrasauge", [0.7]))
    with pytest.raises(NoDensityError):
        pcc.pcc_density(spec, [0.3, 0.5, 0.7])


def test_density_boundary_rejected():
    with pytest.raises(ParameterError):
        pcc.pcc_density(indep3(), [0.0, 0.5, 0.7])


# ---------------------------------------------------------------------------
# cdf3
# ---------------------------------------------------------------------------

def test_cdf3_examples():
    assert pcc.pcc_cdf3(indep3(), 0.3, 0.5, 0.7) == pytest.approx(0.105,
                                                                  abs=1e-9)
    assert pcc.pcc_cdf3(indep3(), 0.3, 1.0, 1.0) == pytest.approx(0.3,
                                                                  abs=1e-9)
    assert pcc.pcc_cdf3(indep3(), 0.0, 0.5, 0.7) == 0.0


def test_cdf3_matches_archimedean_oracle():
    spec = clayton3(2.0)
    gen = ar.mtcj(2.0, max_dim=3)
    assert pcc.pcc_cdf3(spec, 0.5, 0.5, 0.5) == pytest.approx(10.0 ** -0.5,
                                                              abs=1e-6)
    rng = np.random.default_rng(3)
    for u in rng.uniform(0.05, 0.95, (20, 3)):
        want = float(ar.archimedean_cdf(gen, u))
        assert pcc.pcc_cdf3(spec, *u) == pytest.approx(want, abs=1e-6)


def test_cdf3_matches_empirical_cdf():
    spec = clayton3(2.0)
    n = 100_000
    s = pcc.pcc_sample(spec, n, 99)
    rng = np.random.default_rng(4)
    probes = rng.uniform(0.15, 0.9, (20, 3))
    tol = 2.0 / np.sqrt(n)
    for p in probes:
        emp = np.mean(np.all(s <= p, axis=1))
        assert abs(emp - pcc.pcc_cdf3(spec, *p)) < tol


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sample_independence_tau():
    s = pcc.pcc_sample(indep3(), 200_000, 11)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        assert abs(bc.empirical_tau(s[:, [i, j]])) < 0.01


def test_sample_clayton_edge_tau():
    s = pcc.pcc_sample(clayton3(2.0), 200_000, 12)
    assert abs(bc.empirical_tau(s[:, [1, 0]]) - 0.5) < 0.01
    assert abs(bc.empirical_tau(s[:, [1, 2]]) - 0.5) < 0.01


def test_sample_deterministic_and_uniform_margins():
    s1 = pcc.pcc_sample(clayton3(2.0), 2000, 42)
    s2 = pcc.pcc_sample(clayton3(2.0), 2000, 42)
    assert np.array_equal(s1, s2)
    assert not np.array_equal(s1, pcc.pcc_sample(clayton3(2.0), 2000, 43))
    # Kolmogorov-Smirnov distance of each margin: reported, not asserted
    n = s1.shape[0]
    grid = np.arange(1, n + 1) / n
    for j in range(3):
        ks = np.max(np.abs(np.sort(s1[:, j]) - grid))
        print(f"margin {j + 1} KS statistic: {ks:.5f} "
              f"(1% level {1.63 / np.sqrt(n):.5f})")


def test_sample_cuadras_auge_vine_reproducible():
    # Figure-2-left construction: alpha_12 = 0.7 = alpha_13|2, alpha_23 = 0.3
    spec = pcc.trivariate_pcc(
        (1, 0, 2), pcc.EdgeSpec("cuadrasauge", [0.7]),
        pcc.EdgeSpec("cuadrasauge", [0.3]), pcc.EdgeSpec("cuadrasauge", [0.7]))
    t13 = []
    for seed in (7, 8):
        s = pcc.pcc_sample(spec, 100_000, seed)
        t13.append(bc.empirical_tau(s[:, [0, 2]]))
    assert abs(t13[0] - t13[1]) < 0.01
    # the singular component puts mass alpha/(2 - alpha) on the (1,2)
    # diagonal (the h-inverse lands within bisection tolerance of the atom)
    s = pcc.pcc_sample(spec, 20_000, 7)
    diag_mass = np.mean(np.abs(s[:, 0] - s[:, 1]) < 1e-9)
    assert abs(diag_mass - 0.7 / 1.3) < 0.02


def test_sample_nonsimplified_edge():
    spec = extended_frank()
    s = pcc.pcc_sample(spec, 50_000, 5)
    assert s.shape == (50_000, 3)
    # pair margins keep the tree-1 Frank taus
    assert abs(bc.empirical_tau(s[:, [2, 0]])
               - bc.kendall_tau(bc.frank(1.0))) < 0.015
    assert abs(bc.empirical_tau(s[:, [2, 1]])
               - bc.kendall_tau(bc.frank(3.0))) < 0.015


def test_dim4_gaussian_vine_density_and_sampling():
    r4 = np.full((4, 4), 0.5)
    np.fill_diagonal(r4, 1.0)
    p1 = el.partial_correlation_matrix(r4, (1, 2), (0,))[0, 1]
    p2 = el.partial_correlation_matrix(r4, (2, 3), (0, 1))[0, 1]
    g = lambda rho: pcc.EdgeSpec("gaussian", [rho])
    spec = pcc.PccSpec(4, (0, 1, 2, 3), {
        (1, 1): g(0.5), (1, 2): g(0.5), (1, 3): g(0.5),
        (2, 1): g(p1), (2, 2): g(p1), (3, 1): g(p2)})
    # closed-form 4-d gaussian copula density oracle
    from paircop.numerics import norm_ppf
    rinv = np.linalg.inv(r4)
    logdet = np.linalg.slogdet(r4)[1]

    def oracle(u):
        x = norm_ppf(u)
        q = np.einsum("ni,ij,nj->n", x, rinv - np.eye(4), x)
        return np.exp(-0.5 * logdet - 0.5 * q)

    u = np.random.default_rng(8).uniform(0.05, 0.95, (20, 4))
    assert np.max(np.abs(pcc.pcc_density(spec, u) - oracle(u))) < 1e-10
    s = pcc.pcc_sample(spec, 100_000, 31)
    for pair in ((0, 1), (0, 3), (2, 3)):
        assert abs(bc.empirical_tau(s[:, list(pair)]) - 1.0 / 3.0) < 0.012


def test_sample_dim2_and_validation():
    spec = pcc.PccSpec(2, (0, 1), {(1, 1): pcc.EdgeSpec("gaussian", [0.5])})
    s = pcc.pcc_sample(spec, 100_000, 21)
    assert abs(bc.empirical_tau(s) - 1.0 / 3.0) < 0.01
    with pytest.raises(ParameterError):
        pcc.pcc_sample(spec, 0, 1)


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------

def test_extract_independence_product_grid():
    g = pcc.extract_conditional_copula(indep3(), 2, 0.37)
    want = np.outer(g.levels, g.levels)
    assert np.max(np.abs(g.grid - want)) < 1e-8


def test_extract_grid_axioms():
    dens = ar.trivariate_copula_density(ar.gumbel_gen(2.0, max_dim=3))
    g = pcc.extract_conditional_copula(dens, 2, 0.4)
    n = g.n
    # 2-increasing on lattice rectangles
    inc = (g.grid[1:, 1:] - g.grid[:-1, 1:]
           - g.grid[1:, :-1] + g.grid[:-1, :-1])
    assert inc.min() >= -1e-8
    # boundary rows approximate the margins at lattice tolerance
    assert np.max(np.abs(g.grid[:, -1] - g.levels)) < 2.0 / n
    assert np.max(np.abs(g.grid[-1, :] - g.levels)) < 2.0 / n
    # monotone along rows and columns
    assert np.all(np.diff(g.grid, axis=0) >= -1e-12)
    assert np.all(np.diff(g.grid, axis=1) >= -1e-12)


def test_extract_consistency_with_placed_edge():
    # for a simplified spec, extraction recovers the conditioned-edge copula
    spec = gauss3()
    g = pcc.extract_conditional_copula(spec, 0, 0.35)
    want = bc.cdf(bc.gaussian(PARTIAL), g.levels[:, None],
                  g.levels[None, :])
    assert np.max(np.abs(g.grid - want)) < 5e-4


def test_extract_validation():
    with pytest.raises(ParameterError):
        pcc.extract_conditional_copula(indep3(), 2, 0.5, n=5)
    with pytest.raises(ParameterError):
        pcc.extract_conditional_copula(indep3(), 5, 0.5)
    with pytest.raises(ParameterError):
        pcc.extract_conditional_copula(indep3(), 2, 0.0)
    with pytest.raises(ParameterError):
        pcc.extract_conditional_copula("nope", 2, 0.5)


def test_checker_report_structure():
    dens = ar.trivariate_copula_density(ar.mtcj(2.0, max_dim=3))
    rep = pcc.simplified_assumption_check(dens, 2, cond_grid=(0.25, 0.75),
                                          mesh=801)
    assert rep.max_pairwise_sup_deviation < 5e-4
    d = rep.to_dict()
    assert d["cond_index"] == 3
    assert len(d["grids"]) == 2
    assert d["pairwise_sup_deviation"][0][1] == \
        pytest.approx(rep.max_pairwise_sup_deviation)


def test_extracted_tau_constant_for_student_t():
    dens = el.copula_density_callable(el.pearson7_spec(R_HALF, 3.0))
    taus = []
    for u3 in (0.2, 0.5, 0.8):
        g = pcc.extract_conditional_copula(dens, 2, u3)
        taus.append(grid_tau(g.levels, g.grid))
    assert max(taus) - min(taus) < 2e-3


def test_pearson2_is_simplified_numerically():
    # Theorem on compact-support generators, checked via the extractor
    dens = el.copula_density_callable(el.pearson2_spec(R_HALF, 2.0))
    rep = pcc.simplified_assumption_check(dens, 2,
                                          cond_grid=(0.2, 0.5, 0.8))
    assert rep.max_pairwise_sup_deviation < 1e-3
