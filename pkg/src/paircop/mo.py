"""Trivariate symmetric Marshall-Olkin copula.

Shock representation: independent exponential shocks ``E_I`` with a common
rate ``lambda`` for every nonempty ``I`` contained in {1, 2, 3}, and
``X_k = min{E_I : k in I}``. Each margin is exponential with rate
``4 lambda``; the survival copula of ``(X_1, X_2, X_3)`` is the MO copula.

The conditional survival function of ``(X_1, X_2) | X_3 = x_3`` is the
exact four-branch formula obtained by conditioning on which shock realizes
``X_3`` (each of the four with probability 1/4 in the symmetric case). The
conditional margins carry an atom at ``x_i = x_3``, so their generalized
inverses have a flat segment: the conditional copula is unique only where
both margin values avoid the flat segment, which evaluation flags.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .rng import make_rng


@dataclass(frozen=True)
class MoSpec:
    """Common shock rate for all seven shock sets."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam!r}")

    def to_dict(self):
        return {"lambda": self.lam}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["lambda"]))


#: shock subsets in column order (E_1, E_2, E_3, E_12, E_13, E_23, E_123)
_SHOCKS = ((1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3))
_COLS = {1: (0, 3, 4, 6), 2: (1, 3, 5, 6), 3: (2, 4, 5, 6)}


def mo_sample(spec, n, seed):
    """Sample ``n`` observations of ``(X_1, X_2, X_3)``.

    Returns ``(x, u)`` where ``x`` is the n-by-3 matrix of shock minima and
    ``u = exp(-4 lambda x)`` the survival-margin transform, which is
    distributed according to the MO copula.
    """
    n = int(n)
    if n < 1:
        raise ParameterError("n must be positive")
    rng = make_rng(seed)
    e = rng.exponential(1.0 / spec.lam, size=(n, 7))
    x = np.column_stack([e[:, _COLS[k]].min(axis=1) for k in (1, 2, 3)])
    u = np.exp(-4.0 * spec.lam * x)
    return x, u


def mo_conditional_survival(spec, x1, x2, x3):
    """``P(X_1 > x_1, X_2 > x_2 | X_3 = x_3)`` (four-branch formula).

    Continuous across the ``x_1 = x_2`` seam; jumps across ``x_i = x_3``
    by the conditional atom mass there (the value at the boundary belongs
    to the ``x_i <= x_3`` branch).
    """
    lam = spec.lam
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x3 = np.asarray(x3, dtype=float)
    if np.any(x1 <= 0) or np.any(x2 <= 0) or np.any(x3 <= 0):
        raise ParameterError("all arguments must be positive")
    mx = np.maximum(x1, x2)
    base = 0.25 * np.exp(-lam * (x1 + x2 + mx))
    both_below = (x1 <= x3) & (x2 <= x3)
    both_above = (x1 > x3) & (x2 > x3)
    only2_above = (x1 <= x3) & (x2 > x3)
    only1_above = (x2 <= x3) & (x1 > x3)
    out = np.where(both_below, 4.0, 0.0)
    out = np.where(both_above,
                   np.exp(-lam * np.maximum(x1 + x2 + mx - 3.0 * x3, 0.0)),
                   out)
    out = np.where(only2_above, 2.0 * np.exp(-2.0 * lam * (x2 - x3)), out)
    out = np.where(only1_above, 2.0 * np.exp(-2.0 * lam * (x1 - x3)), out)
    return (base * out)[()]


def mo_conditional_margin_inv(spec, v, x3):
    """Generalized inverse of the conditional margin survival function of
    ``X_1 | X_3 = x_3`` (equivalently ``X_2``), with the flat segment
    ``(e^{-2 lam x3}/2, e^{-2 lam x3}]`` mapping to ``x3``."""
    lam = spec.lam
    v = np.asarray(v, dtype=float)
    x3 = np.asarray(x3, dtype=float)
    if np.any(x3 <= 0):
        raise ParameterError("x3 must be positive")
    if np.any(v <= 0) or np.any(v > 1):
        raise ParameterError("v must lie in (0, 1]")
    c = np.exp(-2.0 * lam * x3)
    upper = -np.log(v) / (2.0 * lam)
    lower = 0.5 * (x3 - np.log(2.0 * v) / (2.0 * lam))
    out = np.where(v > c, upper, np.where(v > 0.5 * c, x3, lower))
    return out[()]


def mo_flat_segment(spec, x3):
    """The ``(low, high]`` margin-value interval on which the conditional
    margin inverse is flat (the atom at ``x_i = x_3``)."""
    c = float(np.exp(-2.0 * spec.lam * x3))
    return 0.5 * c, c


def mo_conditional_copula(spec, v1, v2, u3):
    """Conditional copula of the MO copula given its third coordinate.

    ``u3`` converts to ``x3`` through the survival margin
    ``x3 = -log(u3) / (4 lambda)``; the value composes the conditional
    survival function with the two generalized margin inverses. Returns
    ``(value, unique)``: ``unique`` is False when either ``v_i`` falls in
    the flat segment of its margin, where the copula is not uniquely
    determined.
    """
    lam = spec.lam
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    u3 = np.asarray(u3, dtype=float)
    if np.any((v1 <= 0) | (v1 >= 1)) or np.any((v2 <= 0) | (v2 >= 1)):
        raise ParameterError("v1, v2 must lie strictly in (0, 1)")
    if np.any((u3 <= 0) | (u3 >= 1)):
        raise ParameterError("u3 must lie strictly in (0, 1)")
    x3 = -np.log(u3) / (4.0 * lam)
    x1 = mo_conditional_margin_inv(spec, v1, x3)
    x2 = mo_conditional_margin_inv(spec, v2, x3)
    value = mo_conditional_survival(spec, x1, x2, x3)
    c = np.exp(-2.0 * lam * x3)
    in_flat_1 = (v1 > 0.5 * c) & (v1 <= c)
    in_flat_2 = (v2 > 0.5 * c) & (v2 <= c)
    unique = ~(in_flat_1 | in_flat_2)
    return value[()], unique[()]


def mo_grid(spec, u3, n=21):
    """Conditional-copula lattice rows ``(v1, v2, value, unique)`` on the
    quantile levels ``k/(n+1)`` for CSV emission."""
    levels = np.arange(1, int(n) + 1) / (int(n) + 1.0)
    v1, v2 = np.meshgrid(levels, levels, indexing="ij")
    value, unique = mo_conditional_copula(spec, v1.ravel(), v2.ravel(),
                                          float(u3))
    return np.column_stack([v1.ravel(), v2.ravel(), value,
                            unique.astype(float)])
