import numpy as np
import pytest
from numpy.testing import assert_allclose

from paircop import mo
from paircop.errors import ParameterError

from _oracles import mo_conditional_mc

SPEC = mo.MoSpec(2.0)


def test_spec_validation():
    with pytest.raises(ParameterError):
        mo.MoSpec(0.0)
    with pytest.raises(ParameterError):
        mo.MoSpec(-1.0)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sample_marginals_and_u_scale():
    n = 1_000_000
    x, u = mo.mo_sample(SPEC, n, 123)
    # each margin is exponential with rate 4 lambda = 8
    for j in range(3):
        mean = x[:, j].mean()
        stderr = x[:, j].std() / np.sqrt(n)
        assert abs(mean - 1.0 / 8.0) < 3.0 * stderr
    assert_allclose(u, np.exp(-8.0 * x), rtol=1e-12)
    # u-margins approximately uniform
    assert abs(u[:, 0].mean() - 0.5) < 0.002


def test_sample_common_shock_ties():
    x, _ = mo.mo_sample(SPEC, 500_000, 7)
    ties = np.mean((x[:, 0] == x[:, 1]) & (x[:, 1] == x[:, 2]))
    # all three minima realized by E_123: probability 1/7 among 7 iid shocks
    assert abs(ties - 1.0 / 7.0) < 0.005


def test_sample_determinism():
    x1, u1 = mo.mo_sample(SPEC, 5_000, 42)
    x2, u2 = mo.mo_sample(SPEC, 5_000, 42)
    assert np.array_equal(x1, x2) and np.array_equal(u1, u2)
    x3, _ = mo.mo_sample(SPEC, 5_000, 43)
    assert not np.array_equal(x1, x3)


# ---------------------------------------------------------------------------
# conditional survival function
# ---------------------------------------------------------------------------

def test_conditional_survival_examples():
    assert mo.mo_conditional_survival(SPEC, 0.1, 0.1, 0.2) == \
        pytest.approx(np.exp(-0.6), abs=1e-14)
    want = 0.5 * np.exp(-1.4) * np.exp(-0.4)
    assert mo.mo_conditional_survival(SPEC, 0.3, 0.1, 0.2) == \
        pytest.approx(want, abs=1e-14)
    # survival at the origin
    assert mo.mo_conditional_survival(SPEC, 1e-12, 1e-12, 0.2) == \
        pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ParameterError):
        mo.mo_conditional_survival(SPEC, -0.1, 0.1, 0.2)


def test_conditional_survival_against_monte_carlo():
    # acceptance-grade check: 5 x 5 x 3 grid within 5e-3 of the exact
    # conditional shock sampler
    xs = np.linspace(0.05, 0.45, 5)
    worst = 0.0
    for i, x3 in enumerate((0.1, 0.2, 0.35)):
        x1s, x2s = mo_conditional_mc(2.0, x3, 1_000_000, 500 + i)
        for a in xs:
            for b in xs:
                mc = np.mean((x1s > a) & (x2s > b))
                ex = mo.mo_conditional_survival(SPEC, a, b, x3)
                worst = max(worst, abs(mc - ex))
    assert worst < 5e-3


def test_conditional_survival_monotone():
    g = np.linspace(0.01, 0.8, 60)
    for x3 in (0.1, 0.3):
        v = mo.mo_conditional_survival(SPEC, g, np.full_like(g, 0.17), x3)
        assert np.all(np.diff(v) <= 1e-14)
        v = mo.mo_conditional_survival(SPEC, np.full_like(g, 0.17), g, x3)
        assert np.all(np.diff(v) <= 1e-14)


def test_seam_and_atom_structure():
    # continuous across the x1 = x2 seam (max switch)
    a = mo.mo_conditional_survival(SPEC, 0.2 + 1e-13, 0.2, 0.3)
    b = mo.mo_conditional_survival(SPEC, 0.2 - 1e-13, 0.2, 0.3)
    assert abs(a - b) < 1e-12
    # across x_i = x3 the conditional law has an atom: the survival
    # function drops by a factor of exactly 2 (the paper's branch display
    # evaluates the left limit on the boundary)
    left = mo.mo_conditional_survival(SPEC, 0.3, 0.1, 0.3)
    right = mo.mo_conditional_survival(SPEC, 0.3 + 1e-12, 0.1, 0.3)
    assert left / right == pytest.approx(2.0, rel=1e-9)
    left = mo.mo_conditional_survival(SPEC, 0.1, 0.3, 0.3)
    right = mo.mo_conditional_survival(SPEC, 0.1, 0.3 + 1e-12, 0.3)
    assert left / right == pytest.approx(2.0, rel=1e-9)


# ---------------------------------------------------------------------------
# generalized margin inverse
# ---------------------------------------------------------------------------

def test_margin_inverse_examples():
    assert mo.mo_conditional_margin_inv(SPEC, 0.9, 0.08) == \
        pytest.approx(-np.log(0.9) / 4.0, abs=1e-15)
    assert mo.mo_conditional_margin_inv(SPEC, 0.5, 0.08) == 0.08
    assert mo.mo_conditional_margin_inv(SPEC, 1.0, 0.08) == 0.0
    with pytest.raises(ParameterError):
        mo.mo_conditional_margin_inv(SPEC, 0.0, 0.08)


def test_margin_inverse_consistency():
    # margin survival = conditional survival with the other argument at 0+
    for x3 in (0.1, 0.2, 0.35):
        lo, hi = mo.mo_flat_segment(SPEC, x3)
        for v in (0.95, 0.6, 0.3, 0.12, 0.04):
            if lo < v <= hi:
                continue
            x = mo.mo_conditional_margin_inv(SPEC, v, x3)
            back = mo.mo_conditional_survival(SPEC, x, 1e-14, x3)
            assert abs(back - v) < 1e-9, (x3, v)
    # flat segment maps to x3 itself
    for x3 in (0.1, 0.35):
        lo, hi = mo.mo_flat_segment(SPEC, x3)
        assert mo.mo_conditional_margin_inv(SPEC, 0.5 * (lo + hi), x3) == x3


# ---------------------------------------------------------------------------
# conditional copula
# ---------------------------------------------------------------------------

def test_conditional_copula_margin_property():
    v = np.linspace(0.05, 0.95, 12)
    val, un = mo.mo_conditional_copula(SPEC, v, np.full_like(v, 1 - 1e-9),
                                       0.08)
    assert np.max(np.abs(val - v)[un]) < 1e-6
    val, un = mo.mo_conditional_copula(SPEC, np.full_like(v, 1 - 1e-9), v,
                                       0.08)
    assert np.max(np.abs(val - v)[un]) < 1e-6


def test_conditional_copula_unique_flag():
    x3 = -np.log(0.08) / 8.0
    lo, hi = mo.mo_flat_segment(SPEC, x3)
    _, un = mo.mo_conditional_copula(SPEC, 0.5 * (lo + hi), 0.9, 0.08)
    assert not un
    _, un = mo.mo_conditional_copula(SPEC, 0.9, 0.5 * (lo + hi), 0.08)
    assert not un
    _, un = mo.mo_conditional_copula(SPEC, 0.9, 0.9, 0.08)
    assert un


def test_conditional_copula_depends_on_u3_when_bands_straddle():
    """The MO copula is not simplified: once the two conditioning values
    are far enough apart (u3' < u3 / 4, so the margin branch regions
    straddle), values on the mutually-unique region differ by a factor
    sqrt(2) on the straddled band."""
    lev = np.arange(1, 22) / 22.0
    v1, v2 = np.meshgrid(lev, lev, indexing="ij")
    val_a, un_a = mo.mo_conditional_copula(SPEC, v1, v2, 0.08)
    val_b, un_b = mo.mo_conditional_copula(SPEC, v1, v2, 0.5)
    both = un_a & un_b
    assert both.sum() > 50
    assert np.max(np.abs(val_a - val_b)[both]) > 1e-3
    # MC cross-check of one straddled point (see tests/_oracles.py)
    pt = (0.1, 0.3)
    got_a = float(mo.mo_conditional_copula(SPEC, *pt, 0.08)[0])
    got_b = float(mo.mo_conditional_copula(SPEC, *pt, 0.5)[0])
    assert got_a / got_b == pytest.approx(np.sqrt(2.0), rel=1e-12)
    for u3, want, seed in ((0.08, got_a, 21), (0.5, got_b, 22)):
        x3 = -np.log(u3) / 8.0
        x1s, x2s = mo_conditional_mc(2.0, x3, 400_000, seed)
        q1 = np.quantile(x1s, 1 - pt[0], method="inverted_cdf")
        q2 = np.quantile(x2s, 1 - pt[1], method="inverted_cdf")
        mc = np.mean((x1s > q1) & (x2s > q2))
        assert abs(mc - want) < 5e-3


def test_mo_grid_rows():
    rows = mo.mo_grid(SPEC, 0.08, n=5)
    assert rows.shape == (25, 4)
    assert set(np.unique(rows[:, 3])) <= {0.0, 1.0}
    v1, v2, value, unique = rows[7]
    want, uq = mo.mo_conditional_copula(SPEC, v1, v2, 0.08)
    assert value == pytest.approx(float(want))
    assert bool(unique) == bool(uq)
