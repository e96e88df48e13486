"""Archimedean generators and conditional-generator constructions.

Generators follow the Laplace-transform convention: ``phi`` maps
``[0, s0)`` onto ``(0, 1]`` with ``phi(0) = 1``, strictly decreasing, and
the d-dimensional copula is ``phi(sum_j phi_inv(u_j))``.

Conditioning a d-dimensional Archimedean copula on ``k`` of its arguments
yields another Archimedean copula whose generator is

    ``psi(s; a) = h(s + a) / h(a)``,   ``h = (-1)^k phi^(k)``,

with ``a`` the sum of ``phi_inv`` over the conditioning values. For the
generalized MTCJ generator ``(1 + theta s)_+^(-1/theta)`` the conditional
generator has the closed form ``(1 + s theta/(m theta + 1))_+^(-(m theta+1)/theta)``,
i.e. MTCJ again with parameter ``theta / (m theta + 1)``; every other
family drifts with the conditioning value.
"""

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConvergenceError, NoDensityError, ParameterError
from .numerics import solve_decreasing

_FAMILIES = ("mtcj", "frank", "gumbel", "amh", "tabulated")


class ArchimedeanGenerator:
    """Parametric (or tabulated) Archimedean generator valid in dimension
    ``max_dim``."""

    def __init__(self, family, theta=None, max_dim=2, s_grid=None,
                 phi_grid=None):
        if family not in _FAMILIES:
            raise ParameterError(f"unknown generator family {family!r}")
        if max_dim < 2:
            raise ParameterError("max_dim must be at least 2")
        self.family = family
        self.max_dim = int(max_dim)
        self.theta = None if theta is None else float(theta)
        self._interp = None
        if family == "tabulated":
            if s_grid is None or phi_grid is None:
                raise ParameterError("tabulated generator needs s/phi grids")
            s = np.asarray(s_grid, dtype=float)
            p = np.asarray(phi_grid, dtype=float)
            if s.ndim != 1 or s.shape != p.shape or s.size < 4:
                raise ParameterError("tabulated grids must be equal-length 1-d")
            if s[0] != 0.0 or abs(p[0] - 1.0) > 1e-12:
                raise ParameterError("tabulated grid must start at phi(0) = 1")
            if np.any(np.diff(s) <= 0) or np.any(np.diff(p) >= 0):
                raise ParameterError("tabulated generator must be strictly "
                                     "decreasing on an increasing s grid")
            self.s_grid = s
            self.phi_grid = p
            self._interp = PchipInterpolator(s, p, extrapolate=False)
            self._interp_d1 = self._interp.derivative(1)
            self._interp_d2 = self._interp.derivative(2)
        else:
            if theta is None:
                raise ParameterError(f"{family} generator needs theta")
            self._validate_theta()

    def _validate_theta(self):
        th = self.theta
        if self.family == "mtcj":
            lo = -1.0 / (self.max_dim - 1)
            if th < lo or th == 0.0:
                raise ParameterError(
                    f"mtcj theta must satisfy theta >= {lo:g} (dimension "
                    f"{self.max_dim}) and theta != 0, got {th:g}")
        elif self.family == "frank":
            if th <= 0.0:
                raise ParameterError(f"frank alpha must be positive, got {th:g}")
        elif self.family == "gumbel":
            if th < 1.0:
                raise ParameterError(f"gumbel theta must be >= 1, got {th:g}")
        elif self.family == "amh":
            if not 0.0 <= th < 1.0:
                raise ParameterError(f"amh theta must lie in [0, 1), got {th:g}")

    @property
    def support_end(self):
        """``s0 = inf{s : phi(s) = 0}`` (may be infinite)."""
        if self.family == "mtcj" and self.theta < 0:
            return -1.0 / self.theta
        if self.family == "tabulated":
            return float(self.s_grid[-1])
        return np.inf

    # -- generator evaluation -------------------------------------------

    def _phi_deriv(self, s, order):
        """phi^(order)(s) without the public differentiability gate."""
        s = np.asarray(s, dtype=float)
        th = self.theta
        if self.family == "mtcj":
            base = 1.0 + th * s
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                if order == 0:
                    out = np.where(base > 0, base ** (-1.0 / th), 0.0)
                elif order == 1:
                    out = np.where(base > 0, -base ** (-1.0 / th - 1.0), 0.0)
                elif order == 2:
                    out = np.where(base > 0,
                                   (1.0 + th) * base ** (-1.0 / th - 2.0), 0.0)
                elif order == 3:
                    out = np.where(
                        base > 0,
                        -(1.0 + th) * (1.0 + 2.0 * th) * base ** (-1.0 / th - 3.0),
                        0.0)
                else:
                    raise ParameterError("derivative order > 3 not implemented")
            return out[()]
        if self.family == "frank":
            w = (1.0 - np.exp(-th)) * np.exp(-s)
            if order == 0:
                return (-np.log1p(-w) / th)[()]
            if order == 1:
                return (-w / (th * (1.0 - w)))[()]
            if order == 2:
                return (w / (th * (1.0 - w) ** 2))[()]
            if order == 3:
                return (-w * (1.0 + w) / (th * (1.0 - w) ** 3))[()]
            raise ParameterError("derivative order > 3 not implemented")
        if self.family == "gumbel":
            b = 1.0 / th
            with np.errstate(divide="ignore", invalid="ignore"):
                p = s ** b
                e = np.exp(-p)
                if order == 0:
                    out = e
                elif order == 1:
                    out = -b * s ** (b - 1.0) * e
                elif order == 2:
                    out = b * s ** (b - 2.0) * e * (b * p + (1.0 - b))
                elif order == 3:
                    out = -e * (b ** 3 * s ** (3.0 * b - 3.0)
                                + 3.0 * b ** 2 * (1.0 - b) * s ** (2.0 * b - 3.0)
                                + b * (1.0 - b) * (2.0 - b) * s ** (b - 3.0))
                else:
                    raise ParameterError("derivative order > 3 not implemented")
            if order > 0:
                # s = 0 limits: infinite slope for theta > 1, -1 for theta = 1
                inf_lim = -np.inf if order % 2 else np.inf
                lim = (-1.0 if order == 1 else 0.0) if th == 1.0 else inf_lim
                out = np.where(s == 0, lim, out)
            return out[()]
        if self.family == "amh":
            e = np.exp(s)
            d = e - th
            if order == 0:
                return ((1.0 - th) / d)[()]
            if order == 1:
                return (-(1.0 - th) * e / d ** 2)[()]
            if order == 2:
                return ((1.0 - th) * e * (e + th) / d ** 3)[()]
            if order == 3:
                return (-(1.0 - th) * e * (e * e + 4.0 * th * e + th * th)
                        / d ** 4)[()]
            raise ParameterError("derivative order > 3 not implemented")
        # tabulated
        if order == 0:
            out = self._interp(s)
            out = np.where(s > self.s_grid[-1], np.nan, out)
            if np.any(np.isnan(out)):
                raise ParameterError("tabulated generator evaluated outside "
                                     f"[0, {self.s_grid[-1]:g}]")
            return np.clip(out, 0.0, 1.0)[()]
        if order == 1:
            return self._interp_d1(s)[()]
        if order == 2:
            return self._interp_d2(s)[()]
        raise ParameterError("tabulated generator supports orders 0..2 only")

    def phi(self, s, order=0):
        """``phi^(order)(s)`` with the differentiability gate of the
        generator class (derivatives up to ``max_dim - 2``)."""
        if order < 0 or order > 2:
            raise ParameterError("order must lie in {0, 1, 2}")
        if order >= 1 and order > self.max_dim - 2:
            raise ParameterError(
                f"order-{order} derivative requires max_dim >= {order + 2}, "
                f"generator has max_dim = {self.max_dim}")
        s = np.asarray(s, dtype=float)
        if np.any(s < 0):
            raise ParameterError("generator argument must be nonnegative")
        return self._phi_deriv(s, order)

    def phi_inv(self, t):
        """Inverse generator: ``phi(phi_inv(t)) = t`` for ``t`` in (0, 1]."""
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise ParameterError("phi_inv argument must lie in [0, 1]")
        if np.any(t == 0) and not np.isfinite(self.support_end):
            raise ParameterError("phi_inv(0) is infinite for this generator")
        th = self.theta
        with np.errstate(divide="ignore", over="ignore"):
            if self.family == "mtcj":
                out = (t ** -th - 1.0) / th
            elif self.family == "frank":
                out = -np.log(-np.expm1(-th * t) / -np.expm1(-th))
            elif self.family == "gumbel":
                out = (-np.log(t)) ** th
            elif self.family == "amh":
                out = np.log(th + (1.0 - th) / t)
            else:
                rev_s = self.s_grid[::-1]
                rev_p = self.phi_grid[::-1]
                inv = PchipInterpolator(rev_p, rev_s, extrapolate=False)
                out = np.where(t == 0, self.s_grid[-1],
                               np.where(t == 1, 0.0,
                                        inv(np.clip(t, rev_p[0], 1.0))))
        out = np.where(t == 1, 0.0, out)
        return np.maximum(out, 0.0)[()]

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        if self.family == "tabulated":
            return {"family": "tabulated", "max_dim": self.max_dim,
                    "s_grid": self.s_grid.tolist(),
                    "phi_grid": self.phi_grid.tolist()}
        return {"family": self.family, "theta": self.theta,
                "max_dim": self.max_dim}

    @classmethod
    def from_dict(cls, d):
        if d["family"] == "tabulated":
            return cls("tabulated", max_dim=d.get("max_dim", 2),
                       s_grid=d["s_grid"], phi_grid=d["phi_grid"])
        return cls(d["family"], theta=d["theta"], max_dim=d.get("max_dim", 2))

    def __repr__(self):
        if self.family == "tabulated":
            return (f"ArchimedeanGenerator(tabulated, {self.s_grid.size} "
                    f"knots, max_dim={self.max_dim})")
        return (f"ArchimedeanGenerator({self.family}, theta={self.theta:g}, "
                f"max_dim={self.max_dim})")


def mtcj(theta, max_dim=2):
    return ArchimedeanGenerator("mtcj", theta, max_dim)


def frank_gen(alpha, max_dim=2):
    return ArchimedeanGenerator("frank", alpha, max_dim)


def gumbel_gen(theta, max_dim=2):
    return ArchimedeanGenerator("gumbel", theta, max_dim)


def amh_gen(theta, max_dim=2):
    return ArchimedeanGenerator("amh", theta, max_dim)


def generator_eval(gen, s, order=0):
    """Module-level alias for :meth:`ArchimedeanGenerator.phi`."""
    return gen.phi(s, order)


def generator_inv(gen, t):
    """Module-level alias for :meth:`ArchimedeanGenerator.phi_inv`."""
    return gen.phi_inv(t)


def archimedean_cdf(gen, u):
    """d-dimensional Archimedean cdf ``phi(sum_j phi_inv(u_j))``.

    ``u`` has shape ``(d,)`` or ``(n, d)`` with ``d <= gen.max_dim``.
    Coordinates equal to 1 drop out exactly; any zero coordinate gives 0.
    """
    u = np.asarray(u, dtype=float)
    d = u.shape[-1]
    if d > gen.max_dim:
        raise ParameterError(
            f"dimension {d} exceeds generator max_dim {gen.max_dim}")
    if np.any((u < 0) | (u > 1)):
        raise ParameterError("coordinates must lie in [0, 1]")
    zero = np.any(u == 0, axis=-1)
    safe = np.where(u == 0, 1.0, u)
    s = np.sum(gen.phi_inv(safe), axis=-1)
    s_cap = gen.support_end
    if np.isfinite(s_cap):
        val = np.where(s >= s_cap, 0.0, gen._phi_deriv(np.minimum(s, s_cap), 0))
    else:
        val = gen._phi_deriv(s, 0)
    return np.where(zero, 0.0, val)[()]


class ConditionalGenerator:
    """Generator ``psi(s; a) = h(s + a)/h(a)`` of the conditional copula of
    an Archimedean copula given ``k`` conditioning values with
    ``a = sum phi_inv(u_cond)``."""

    def __init__(self, base, k, a):
        if k not in (1, 2):
            raise ParameterError("k must be 1 or 2 (cases with a derived "
                                 "closed construction)")
        if k > base.max_dim - 1:
            raise ParameterError(
                f"k = {k} needs a generator valid in dimension >= {k + 1}")
        a = float(a)
        s0 = base.support_end
        if not 0.0 < a < s0:
            raise ParameterError(
                f"conditioning argument a = {a:g} must lie in (0, {s0:g})")
        self.base = base
        self.k = int(k)
        self.a = a
        self._sign = -1.0 if k % 2 else 1.0
        self._ha = float(self._h(a))
        if not np.isfinite(self._ha) or self._ha <= 0:
            raise ParameterError(
                f"h(a) = {self._ha!r} is not finite positive at a = {a:g}")
        probe = self._h(a + min(1.0, (s0 - a) / 2))
        if not probe < self._ha:
            raise ParameterError("h is not strictly decreasing beyond a; "
                                 "conditional generator undefined")

    def _h(self, s):
        return self._sign * self.base._phi_deriv(s, self.k)

    @property
    def support_end(self):
        """Support endpoint of ``psi(.; a)``."""
        return self.base.support_end - self.a

    def psi(self, s):
        """``psi(s; a) = h(s + a)/h(a)``, the conditional generator."""
        s = np.asarray(s, dtype=float)
        if np.any(s < 0):
            raise ParameterError("generator argument must be nonnegative")
        return (self._h(s + self.a) / self._ha)[()]

    def psi_inv(self, v):
        """``psi_inv(v; a) = h^{-1}(v h(a)) - a`` by monotone root-finding
        (bisection on the bracketed root, 1e-13 argument tolerance)."""
        v = np.asarray(v, dtype=float)
        if np.any((v <= 0) | (v > 1)):
            raise ParameterError("psi_inv argument must lie in (0, 1]")
        s0 = self.base.support_end
        x = solve_decreasing(self._h, v * self._ha, self.a, s0,
                             xtol=1e-13, first_hi=max(2.0 * self.a, 1.0))
        out = np.maximum(np.asarray(x) - self.a, 0.0)
        return np.where(v == 1.0, 0.0, out)[()]

    def tabulate(self, s_max=None, n=513):
        """Freeze ``psi(.; a)`` on a grid as a reusable tabulated generator."""
        if s_max is None:
            if np.isfinite(self.support_end):
                s_max = self.support_end * (1 - 1e-9)
            else:
                s_max = float(self.psi_inv(1e-8))
        s = np.linspace(0.0, float(s_max), int(n))
        p = np.asarray(self.psi(s), dtype=float)
        p[0] = 1.0
        return ArchimedeanGenerator("tabulated", max_dim=self.base.max_dim - self.k,
                                    s_grid=s, phi_grid=p)

    def __repr__(self):
        return (f"ConditionalGenerator(base={self.base!r}, k={self.k}, "
                f"a={self.a:g})")


def conditional_generator(base, k, a):
    """Construct ``psi(.; a)`` with ``h = (-1)^k phi^(k)``; see
    :class:`ConditionalGenerator`."""
    return ConditionalGenerator(base, k, a)


def mtcj_conditional_generator(theta, m, max_dim=2):
    """Closed-form MTCJ conditional generator after conditioning on ``m``
    variables: MTCJ with parameter ``theta / (m theta + 1)``.

    ``m = 0`` returns the base generator.
    """
    if m < 0 or int(m) != m:
        raise ParameterError("m must be a nonnegative integer")
    theta = float(theta)
    if m == 0:
        return mtcj(theta, max_dim)
    scale = m * theta + 1.0
    if scale <= 0.0:
        raise ParameterError(
            f"m*theta + 1 = {scale:g} must be positive for the conditional "
            "generator to exist")
    return mtcj(theta / scale, max_dim)


def conditional_archimedean_copula_cdf(cg, v):
    """Copula cdf generated by a conditional generator:
    ``psi(sum_j psi_inv(v_j); a)``.

    Equals ``h(sum_j h^{-1}(v_j h(a)) - (len(v) - 1) a) / h(a)``; reduces to
    the remaining coordinate when all others are 1.
    """
    v = np.asarray(v, dtype=float)
    if np.any((v < 0) | (v > 1)):
        raise ParameterError("coordinates must lie in [0, 1]")
    if v.shape[-1] > cg.base.max_dim - cg.k:
        raise ParameterError(
            f"conditional copula dimension {v.shape[-1]} exceeds "
            f"{cg.base.max_dim - cg.k}")
    zero = np.any(v == 0, axis=-1)
    safe = np.where(v == 0, 1.0, v)
    s = np.sum(np.asarray(cg.psi_inv(safe)), axis=-1)
    cap = cg.support_end
    if np.isfinite(cap):
        val = np.where(s >= cap, 0.0, cg.psi(np.minimum(s, cap)))
    else:
        val = cg.psi(s)
    return np.where(zero, 0.0, val)[()]


def trivariate_copula_density(gen):
    """Return the trivariate Archimedean copula density as a vectorized
    callable ``c(u1, u2, u3)`` (analytic third generator derivative).

    Not available for tabulated generators.
    """
    if gen.family == "tabulated":
        raise NoDensityError("third derivatives of tabulated generators are "
                             "not reliable; no density callable")
    if gen.max_dim < 3:
        raise ParameterError("generator must be valid in dimension 3")

    def density(u1, u2, u3):
        s1 = gen.phi_inv(np.asarray(u1, float))
        s2 = gen.phi_inv(np.asarray(u2, float))
        s3 = gen.phi_inv(np.asarray(u3, float))
        s = s1 + s2 + s3
        num = gen._phi_deriv(s, 3)
        den = (gen._phi_deriv(s1, 1) * gen._phi_deriv(s2, 1)
               * gen._phi_deriv(s3, 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / den
        return np.where(np.isfinite(out), np.maximum(out, 0.0), 0.0)[()]

    return density
