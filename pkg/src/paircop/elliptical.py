"""Elliptical generators, conditional Student-t copulas, and scale-mixture
diagnostics.

Covers the three density-generator families with location-scale conditional
distributions (Gauss, Pearson VII / Student-t, Pearson II), the partial
correlation matrix, the closed-form conditional copula of the Student-t
(``nu + |B|`` degrees of freedom, correlation from the partial-correlation
matrix, independent of the conditioning values), the arcsine tau-rho
relation, and tilted-moment profiles of the scale-mixing variable that are
constant exactly when the mixing distribution is Gamma.
"""

import numpy as np
from scipy import special

from . import bicop
from .errors import ConvergenceError, ParameterError
from .numerics import norm_cdf, norm_ppf, quad_gk, t_cdf, t_ppf

_GENERATORS = ("gauss", "pearson7", "pearson2")


def _validate_corr(R):
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ParameterError("correlation matrix must be square")
    if not np.allclose(R, R.T, atol=1e-12):
        raise ParameterError("correlation matrix must be symmetric")
    if not np.allclose(np.diag(R), 1.0, atol=1e-12):
        raise ParameterError("correlation matrix must have unit diagonal")
    if np.linalg.eigvalsh(R)[0] <= 0.0:
        raise ParameterError("correlation matrix must be positive definite")
    return R


class EllipticalSpec:
    """Density-generator family, correlation matrix and shape parameter."""

    def __init__(self, generator, R, shape=None):
        if generator not in _GENERATORS:
            raise ParameterError(f"unknown elliptical generator {generator!r}")
        self.generator = generator
        self.R = _validate_corr(R)
        self.shape = None if shape is None else float(shape)
        if generator == "pearson7" and (self.shape is None or self.shape <= 0):
            raise ParameterError("pearson7 requires shape nu > 0")
        if generator == "pearson2" and (self.shape is None or self.shape <= 1):
            raise ParameterError("pearson2 requires shape zeta > 1")

    @property
    def dim(self):
        return self.R.shape[0]

    def to_dict(self):
        return {"generator": self.generator, "dim": self.dim,
                "R": [float(x) for x in self.R.ravel()],
                "shape": self.shape}

    @classmethod
    def from_dict(cls, d):
        n = int(d["dim"])
        R = np.asarray(d["R"], dtype=float).reshape(n, n)
        return cls(d["generator"], R, d.get("shape"))


def gauss_spec(R):
    return EllipticalSpec("gauss", R)


def pearson7_spec(R, nu):
    return EllipticalSpec("pearson7", R, nu)


def pearson2_spec(R, zeta):
    return EllipticalSpec("pearson2", R, zeta)


def partial_correlation_matrix(R, A, B):
    """Correlation matrix of the pair ``A`` after linearly conditioning on
    the index set ``B``: normalize ``R_A - R_AB R_B^{-1} R_AB'``.

    Indices are 0-based.
    """
    R = _validate_corr(R)
    A = tuple(int(i) for i in A)
    B = tuple(int(i) for i in B)
    if len(A) != 2:
        raise ParameterError("A must contain exactly two indices")
    if set(A) & set(B):
        raise ParameterError("A and B must be disjoint")
    ra = R[np.ix_(A, A)]
    if not B:
        return ra.copy()
    rb = R[np.ix_(B, B)]
    rab = R[np.ix_(A, B)]
    try:
        solve = np.linalg.solve(rb, rab.T)
    except np.linalg.LinAlgError as exc:
        raise ParameterError(f"conditioning block R_B is singular: {exc}")
    v = ra - rab @ solve
    d = np.sqrt(np.diag(v))
    if np.any(d <= 0):
        raise ParameterError("degenerate conditional covariance")
    out = v / np.outer(d, d)
    out[0, 0] = out[1, 1] = 1.0
    out[0, 1] = out[1, 0] = 0.5 * (out[0, 1] + out[1, 0])
    return out


def t_conditional_copula(R, nu, A, B):
    """Copula of a Student-t pair ``A`` given the components ``B``.

    This is again a bivariate Student-t copula, with ``nu + |B|`` degrees
    of freedom and the partial correlation of ``A`` given ``B``; the
    conditioning *values* drop out (their effect is a pure location-scale
    change), which is why the signature takes none.
    """
    if nu <= 0:
        raise ParameterError("nu must be positive")
    rab = partial_correlation_matrix(R, A, B)
    return bicop.student_t(float(rab[0, 1]), float(nu) + len(tuple(B)))


def tau_rho(rho):
    """Kendall's tau of an atom-free elliptical copula:
    ``(2 / pi) arcsin(rho)``."""
    rho = np.asarray(rho, dtype=float)
    if np.any((rho <= -1) | (rho >= 1)):
        raise ParameterError("rho must lie in (-1, 1)")
    return ((2.0 / np.pi) * np.arcsin(rho))[()]


def rho_tau(tau):
    """Inverse of :func:`tau_rho`: ``sin(pi tau / 2)``."""
    tau = np.asarray(tau, dtype=float)
    if np.any((tau <= -1) | (tau >= 1)):
        raise ParameterError("tau must lie in (-1, 1)")
    return np.sin(0.5 * np.pi * tau)[()]


def elliptical_generator_eval(spec, t, n):
    """Normalized density generator ``g_n(t)`` of the family in dimension
    ``n`` (so that ``|R|^{-1/2} g_n(x' R^{-1} x)`` is a density)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("generator argument must be nonnegative")
    if spec.generator == "gauss":
        return ((2.0 * np.pi) ** (-n / 2.0) * np.exp(-0.5 * t))[()]
    if spec.generator == "pearson7":
        nu = spec.shape
        logc = (special.gammaln(0.5 * (nu + n)) - special.gammaln(0.5 * nu)
                - 0.5 * n * np.log(nu * np.pi))
        return (np.exp(logc) * (1.0 + t / nu) ** (-0.5 * (nu + n)))[()]
    zeta = spec.shape
    logc = (special.gammaln(0.5 * n + zeta + 1.0) - special.gammaln(zeta + 1.0)
            - 0.5 * n * np.log(np.pi))
    return (np.exp(logc) * np.where(t < 1.0, (1.0 - np.minimum(t, 1.0)) ** zeta,
                                    0.0))[()]


# ---------------------------------------------------------------------------
# margins and trivariate copula densities (for the numerical extractor)
# ---------------------------------------------------------------------------

def _margin_ppf(spec, u):
    """Quantile of the univariate margin of the d-dimensional family."""
    u = np.asarray(u, dtype=float)
    if spec.generator == "gauss":
        return norm_ppf(u)
    if spec.generator == "pearson7":
        return t_ppf(u, spec.shape)
    # Pearson II margins in dimension d are Pearson II with
    # zeta_1 = zeta + (d - 1) / 2 on [-1, 1]
    z1 = spec.shape + 0.5 * (spec.dim - 1)
    w = special.betaincinv(0.5, z1 + 1.0, np.abs(2.0 * u - 1.0))
    return np.sign(u - 0.5) * np.sqrt(w)


def _margin_logpdf(spec, x):
    x = np.asarray(x, dtype=float)
    if spec.generator == "gauss":
        return -0.5 * x * x - 0.5 * np.log(2.0 * np.pi)
    if spec.generator == "pearson7":
        nu = spec.shape
        logc = (special.gammaln(0.5 * (nu + 1.0)) - special.gammaln(0.5 * nu)
                - 0.5 * np.log(nu * np.pi))
        return logc - 0.5 * (nu + 1.0) * np.log1p(x * x / nu)
    z1 = spec.shape + 0.5 * (spec.dim - 1)
    logc = -special.betaln(0.5, z1 + 1.0)
    t = np.minimum(x * x, 1.0)
    with np.errstate(divide="ignore"):
        return logc + z1 * np.log1p(-t)


def copula_density_callable(spec):
    """Trivariate elliptical copula density as a vectorized callable
    ``c(u1, u2, u3)``; the workhorse behind the numerical conditional-copula
    extractor for elliptical models."""
    if spec.dim != 3:
        raise ParameterError("copula density callable requires a 3x3 R")
    Rinv = np.linalg.inv(spec.R)
    logdet = np.linalg.slogdet(spec.R)[1]

    def density(u1, u2, u3):
        x1 = _margin_ppf(spec, np.asarray(u1, float))
        x2 = _margin_ppf(spec, np.asarray(u2, float))
        x3 = _margin_ppf(spec, np.asarray(u3, float))
        q = (Rinv[0, 0] * x1 * x1 + Rinv[1, 1] * x2 * x2
             + Rinv[2, 2] * x3 * x3
             + 2.0 * (Rinv[0, 1] * x1 * x2 + Rinv[0, 2] * x1 * x3
                      + Rinv[1, 2] * x2 * x3))
        top = elliptical_generator_eval(spec, np.maximum(q, 0.0), 3)
        logbot = (_margin_logpdf(spec, x1) + _margin_logpdf(spec, x2)
                  + _margin_logpdf(spec, x3))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.exp(-0.5 * logdet + np.log(np.maximum(top, 0.0))
                         - logbot)
        return np.where(np.isfinite(out), out, 0.0)[()]

    return density


# ---------------------------------------------------------------------------
# scale-mixture diagnostics
# ---------------------------------------------------------------------------

class MixingDistribution:
    """Distribution of the mixing variable ``W`` in a scale mixture of
    Normals ``X = Z / sqrt(W)``.

    Kinds: ``gamma(shape, rate)``, ``two_point(w1, w2, p)``,
    ``log_normal(mu, sigma)``, ``tabulated(v_grid, f_grid)``.
    """

    def __init__(self, kind, params):
        self.kind = kind
        self.params = tuple(float(x) for x in params)
        if kind == "gamma":
            a, b = self.params
            if a <= 0 or b <= 0:
                raise ParameterError("gamma mixing needs shape, rate > 0")
        elif kind == "two_point":
            w1, w2, p = self.params
            if w1 <= 0 or w2 <= 0 or not 0 < p < 1:
                raise ParameterError("two_point needs atoms > 0 and p in (0,1)")
        elif kind == "log_normal":
            _, sigma = self.params
            if sigma <= 0:
                raise ParameterError("log_normal needs sigma > 0")
        elif kind == "tabulated":
            raise ParameterError("use MixingDistribution.tabulated(...)")
        else:
            raise ParameterError(f"unknown mixing kind {kind!r}")
        self._v_grid = None
        self._f_grid = None

    @classmethod
    def gamma(cls, shape, rate):
        return cls("gamma", (shape, rate))

    @classmethod
    def two_point(cls, w1, w2, p):
        return cls("two_point", (w1, w2, p))

    @classmethod
    def log_normal(cls, mu, sigma):
        return cls("log_normal", (mu, sigma))

    @classmethod
    def tabulated(cls, v_grid, f_grid):
        v = np.asarray(v_grid, dtype=float)
        f = np.asarray(f_grid, dtype=float)
        if v.ndim != 1 or v.shape != f.shape or v.size < 4:
            raise ParameterError("tabulated mixing needs equal-length grids")
        if np.any(v <= 0) or np.any(np.diff(v) <= 0):
            raise ParameterError("v grid must be positive and increasing")
        if np.any(f < 0):
            raise ParameterError("density values must be nonnegative")
        obj = cls.__new__(cls)
        obj.kind = "tabulated"
        obj.params = ()
        obj._v_grid = v
        obj._f_grid = f
        return obj

    @property
    def is_discrete(self):
        return self.kind == "two_point"

    def pdf(self, v):
        """Mixing density ``f_W`` (continuous kinds only)."""
        v = np.asarray(v, dtype=float)
        if self.kind == "gamma":
            a, b = self.params
            with np.errstate(divide="ignore", invalid="ignore"):
                logf = (a * np.log(b) - special.gammaln(a)
                        + (a - 1.0) * np.log(v) - b * v)
            return np.where(v > 0, np.exp(logf), 0.0)[()]
        if self.kind == "log_normal":
            mu, sg = self.params
            with np.errstate(divide="ignore", invalid="ignore"):
                z = (np.log(v) - mu) / sg
                logf = -0.5 * z * z - np.log(v * sg * np.sqrt(2.0 * np.pi))
            return np.where(v > 0, np.exp(logf), 0.0)[()]
        if self.kind == "tabulated":
            return np.interp(v, self._v_grid, self._f_grid,
                             left=0.0, right=0.0)[()]
        raise ParameterError("two_point mixing has no density")

    def atoms(self):
        if self.kind != "two_point":
            raise ParameterError("atoms() is only defined for two_point")
        w1, w2, p = self.params
        return np.array([w1, w2]), np.array([p, 1.0 - p])

    def validate(self, tol=1e-8):
        """Check the density integrates to one (quadrature) and that the
        moments needed by the profiles are finite."""
        if self.is_discrete:
            return
        mass = _mix_integral(self, 0.0, 0.0)
        if abs(mass - 1.0) > tol:
            raise ParameterError(
                f"mixing density integrates to {mass:.10g}, not 1")

    def to_dict(self):
        if self.kind == "tabulated":
            return {"kind": "tabulated", "v_grid": self._v_grid.tolist(),
                    "f_grid": self._f_grid.tolist()}
        return {"kind": self.kind, "params": list(self.params)}

    @classmethod
    def from_dict(cls, d):
        if d["kind"] == "tabulated":
            return cls.tabulated(d["v_grid"], d["f_grid"])
        return cls(d["kind"], tuple(d["params"]))


def _mix_integral(mix, power, t):
    """``int v^power e^{-t v} f_W(v) dv`` over (0, inf), via the
    substitution ``v = x / (1 - x)`` and adaptive Gauss-Kronrod."""
    if mix.kind == "tabulated":
        # piecewise-linear density: refine its own grid and use the
        # trapezoid rule (adaptive rules fight the kinks)
        v = np.linspace(mix._v_grid[0], mix._v_grid[-1],
                        max(20001, 16 * mix._v_grid.size))
        f = v ** power * np.exp(-t * v) * np.asarray(mix.pdf(v))
        return float(np.trapezoid(f, v))

    def f(x):
        v = x / (1.0 - x)
        jac = 1.0 / (1.0 - x) ** 2
        return v ** power * np.exp(-t * v) * mix.pdf(v) * jac

    return quad_gk(f, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12)


def tilted_moment(mix, t, p):
    """``E[V_t^p]`` where ``f_V`` is proportional to ``v^{1/2} f_W(v)`` and
    ``V_t`` is the Laplace tilt of ``V`` at ``t`` (density proportional to
    ``e^{-t v} f_V(v)``). ``t = 0`` recovers the plain moment of ``V``."""
    if t < 0:
        raise ParameterError("tilt parameter t must be nonnegative")
    if p <= 0:
        raise ParameterError("moment order p must be positive")
    if mix.is_discrete:
        w, prob = mix.atoms()
        weight = prob * np.sqrt(w) * np.exp(-t * w)
        return float(np.sum(w ** p * weight) / np.sum(weight))
    num = _mix_integral(mix, p + 0.5, t)
    den = _mix_integral(mix, 0.5, t)
    if den <= 0 or not np.isfinite(num):
        raise ConvergenceError(
            f"tilted moment E[V_t^{p:g}] at t={t:g} did not converge "
            f"(num={num!r}, den={den!r})")
    return num / den


_PROFILE_VARIANTS = ("e4", "f3_first", "f3_second")


def simplified_ratio_profile(mix, d, t_grid, variant="e4"):
    """Moment-ratio profile over the tilt grid; constant in ``t`` exactly
    for Gamma mixing.

    Variants (all scale-invariant in ``V_t``):

    * ``"e4"``:       ``E[V_t^{(d-1)/2}] / E[V_t^{1/2}]^{d-1}``
    * ``"f3_first"``: ``E[V_t^{(d+1)/2}] / E[V_t^{1/2}]^{d+1}``
    * ``"f3_second"``: ``E[V_t^{(d-1)/2}] E[V_t^{3/2}] / E[V_t^{1/2}]^{d+2}``
    """
    if d < 3:
        raise ParameterError("profile requires dimension d >= 3")
    if variant not in _PROFILE_VARIANTS:
        raise ParameterError(f"variant must be one of {_PROFILE_VARIANTS}")
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty(t_grid.shape, dtype=float)
    for i, t in enumerate(t_grid.ravel()):
        e_half = tilted_moment(mix, t, 0.5)
        if variant == "e4":
            out.ravel()[i] = (tilted_moment(mix, t, 0.5 * (d - 1))
                              / e_half ** (d - 1))
        elif variant == "f3_first":
            out.ravel()[i] = (tilted_moment(mix, t, 0.5 * (d + 1))
                              / e_half ** (d + 1))
        else:
            out.ravel()[i] = (tilted_moment(mix, t, 0.5 * (d - 1))
                              * tilted_moment(mix, t, 1.5)
                              / e_half ** (d + 2))
    return out


def relative_spread(profile):
    """``max / min - 1`` of a positive profile."""
    profile = np.asarray(profile, dtype=float)
    return float(np.max(profile) / np.min(profile) - 1.0)
