"""Shared numerical machinery: special functions, quadrature, inversion.

Student-t cdf/quantile go through the regularized incomplete beta function
and its inverse; the bivariate normal cdf integrates Plackett's identity
with a fixed Gauss-Legendre rule. Monotone inversion uses bracketing
bisection (generalized-inverse convention at jumps and flats) with an
optional Newton polish.
"""

from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError

#: inputs to densities / h-functions are clamped into [EPS, 1 - EPS]
CLAMP_EPS = 1e-10


def clamp_unit(x, eps=CLAMP_EPS):
    """Clamp ``x`` into ``[eps, 1 - eps]``."""
    return np.clip(x, eps, 1.0 - eps)


def norm_cdf(x):
    return special.ndtr(x)


def norm_ppf(p):
    return special.ndtri(p)


def t_cdf(x, nu):
    """Student-t cdf with ``nu`` degrees of freedom.

    Uses the tail identity ``P(T > x) = I_{nu/(nu+x^2)}(nu/2, 1/2) / 2``
    for ``x >= 0`` with the regularized incomplete beta ``I``.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        z = nu / (nu + x * x)
    tail = 0.5 * special.betainc(0.5 * nu, 0.5, z)
    out = np.where(x >= 0, 1.0 - tail, tail)
    out = np.where(np.isposinf(x), 1.0, out)
    out = np.where(np.isneginf(x), 0.0, out)
    return out[()]


def t_ppf(p, nu):
    """Student-t quantile via the inverse regularized incomplete beta."""
    p = np.asarray(p, dtype=float)
    tail = 2.0 * np.minimum(p, 1.0 - p)
    z = special.betaincinv(0.5 * nu, 0.5, tail)
    with np.errstate(divide="ignore"):
        x = np.sqrt(nu * (1.0 - z) / z)
    return np.where(p >= 0.5, x, -x)[()]


@lru_cache(maxsize=None)
def gauss_legendre_01(n):
    """Gauss-Legendre nodes and weights transplanted to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def bivariate_norm_cdf(x, y, rho, n_nodes=96):
    """Standard bivariate normal cdf at ``(x, y)`` with correlation ``rho``.

    Integrates Plackett's identity d(Phi_2)/d(rho) = bivariate density from
    the independent case. Accurate to ~1e-13 for ``|rho| <= 0.99``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if rho == 0.0:
        return special.ndtr(x) * special.ndtr(y)
    nodes, weights = gauss_legendre_01(n_nodes)
    r = rho * nodes
    xs = np.where(np.isfinite(x), x, 0.0)[..., None]
    ys = np.where(np.isfinite(y), y, 0.0)[..., None]
    omr2 = 1.0 - r * r
    dens = np.exp(-0.5 * (xs * xs - 2.0 * r * xs * ys + ys * ys) / omr2)
    dens /= 2.0 * np.pi * np.sqrt(omr2)
    corr = rho * np.sum(weights * dens, axis=-1)
    out = special.ndtr(x) * special.ndtr(y) + corr
    # infinite arguments degenerate to the univariate margins
    out = np.where(np.isposinf(x), special.ndtr(y), out)
    out = np.where(np.isposinf(y), np.where(np.isposinf(x), 1.0, special.ndtr(x)), out)
    out = np.where(np.isneginf(x) | np.isneginf(y), 0.0, out)
    return out[()]


def invert_monotone(f, target, lo, hi, *, increasing=True, xtol=1e-12,
                    deriv=None, newton_steps=5):
    """Solve ``f(x) = target`` for monotone ``f``, vectorized.

    Bracketing bisection down to interval width ``xtol``; at jumps and flat
    segments this converges to the generalized inverse
    ``inf{x : f(x) >= target}`` (for increasing ``f``). If ``deriv`` is
    given, up to ``newton_steps`` Newton corrections polish the root inside
    the final bracket.
    """
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, float), target.shape).copy().astype(float)
    hi = np.broadcast_to(np.asarray(hi, float), target.shape).copy().astype(float)
    width = float(np.max(hi - lo)) if target.size else 0.0
    if width < 0:
        raise ConvergenceError(f"empty bracket: lo={lo!r} hi={hi!r}")
    n_iter = max(1, int(np.ceil(np.log2(max(width, xtol) / xtol))))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        above = fmid >= target if increasing else fmid <= target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    x = 0.5 * (lo + hi)
    if deriv is not None:
        sign = 1.0 if increasing else -1.0
        for _ in range(newton_steps):
            fx = f(x)
            d = sign * np.asarray(deriv(x), float)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(d > 0, sign * (fx - target) / d, 0.0)
            step = np.where(np.isfinite(step), step, 0.0)
            x = np.clip(x - step, lo, hi)
    return x


def solve_decreasing(f, y, lo, hi_cap, *, xtol=1e-13, first_hi=1.0):
    """Solve ``f(x) = y`` (scalar or array ``y``) for continuous strictly
    decreasing ``f`` on ``[lo, hi_cap)``.

    The upper bracket expands geometrically from ``first_hi`` until it
    covers the smallest target; ``hi_cap`` may be ``inf``.
    """
    y = np.asarray(y, dtype=float)
    y_min = float(np.min(y)) if y.size else 0.0
    if np.isfinite(hi_cap):
        hi = hi_cap - (hi_cap - lo) * 1e-15
    else:
        hi = first_hi
        for _ in range(200):
            if f(hi) <= y_min:
                break
            hi *= 2.0
        else:
            raise ConvergenceError(
                f"upper bracket expansion failed: f({hi:g})={f(hi):g} "
                f"still above target {y_min:g}")
    return invert_monotone(f, y, lo, hi, increasing=False, xtol=xtol)


def quad_gk(f, a, b, *, epsabs=1e-10, epsrel=1e-10, limit=200):
    """Adaptive Gauss-Kronrod integration of ``f`` over ``[a, b]``.

    Raises :class:`ConvergenceError` when QUADPACK reports trouble or the
    result is not finite.
    """
    out = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel,
                         limit=limit, full_output=1)
    value = out[0]
    if len(out) > 3:
        raise ConvergenceError(
            f"quadrature on [{a:g}, {b:g}] did not converge: {out[3]}")
    if not np.isfinite(value):
        raise ConvergenceError(
            f"quadrature on [{a:g}, {b:g}] returned {value!r}")
    return value


def cumulative_trapezoid_2d(values, grid):
    """Cumulative double integral of ``values`` (on ``grid`` x ``grid``)
    by nested trapezoid rules; entry ``[i, j]`` approximates the integral
    over ``[grid[0], grid[i]] x [grid[0], grid[j]]``."""
    g = integrate.cumulative_trapezoid(values, grid, axis=0, initial=0.0)
    return integrate.cumulative_trapezoid(g, grid, axis=1, initial=0.0)


def bilinear(grid, values, xq, yq):
    """Bilinear interpolation of ``values`` tabulated on ``grid x grid``."""
    xq = np.asarray(xq, float)
    yq = np.asarray(yq, float)
    i = np.clip(np.searchsorted(grid, xq) - 1, 0, len(grid) - 2)
    j = np.clip(np.searchsorted(grid, yq) - 1, 0, len(grid) - 2)
    hx = grid[i + 1] - grid[i]
    hy = grid[j + 1] - grid[j]
    tx = np.clip((xq - grid[i]) / hx, 0.0, 1.0)
    ty = np.clip((yq - grid[j]) / hy, 0.0, 1.0)
    v00 = values[i, j]
    v10 = values[i + 1, j]
    v01 = values[i, j + 1]
    v11 = values[i + 1, j + 1]
    return ((1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10
            + (1 - tx) * ty * v01 + tx * ty * v11)
