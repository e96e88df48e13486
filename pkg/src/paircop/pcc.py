"""Pair copula construction engine on C-vine structures.

A :class:`PccSpec` fixes a root ordering and one bivariate copula per vine
edge; edge parameters are either constants or functions of the values of
the conditioning variables (the non-simplified case). The module supplies
the C-vine copula density, inverse-Rosenblatt sampling, the trivariate cdf
by integrating over the root variable, and the numerical
conditional-copula extractor used to test the simplifying assumption: it
tabulates the conditional joint cdf of a trivariate copula density on a
tensor mesh, inverts the conditional margins, and reads the conditional
copula off a quantile lattice.
"""

import numpy as np

from . import bicop
from .bicop import (BivariateCopulaSpec, _kernel_cdf, _kernel_hfunc,
                    _kernel_hinv, _kernel_pdf, _validate_params)
from .errors import ConvergenceError, ParameterError
from .numerics import (bilinear, clamp_unit, cumulative_trapezoid_2d,
                       gauss_legendre_01, quad_gk)
from .rng import make_rng

DEFAULT_GRID_N = 21
DEFAULT_MESH = 2001
DEFAULT_COND_GRID = tuple(np.round(np.arange(1, 10) * 0.1, 10))


class ParamFunction:
    """Edge parameter resolution: a constant vector, the Frank-tilt map
    ``theta = 1 - exp(-alpha * u_cond)`` (the conditional-copula parameter
    of the trivariate Frank copula), or a tabulated map from the joint
    probability of the conditioning values to a parameter."""

    def __init__(self, form, **kw):
        if form not in ("constant", "frank_amh_tilt", "joint_probability"):
            raise ParameterError(f"unknown parameter function {form!r}")
        self.form = form
        if form == "constant":
            self.values = tuple(float(x) for x in kw["values"])
        elif form == "frank_amh_tilt":
            self.alpha = float(kw["alpha"])
            if self.alpha <= 0:
                raise ParameterError("frank_amh_tilt alpha must be positive")
        else:
            self.base = kw["base"]
            if not isinstance(self.base, BivariateCopulaSpec):
                raise ParameterError("joint_probability base must be a "
                                     "BivariateCopulaSpec")
            self.c_grid = np.asarray(kw["c_grid"], dtype=float)
            self.theta_grid = np.asarray(kw["theta_grid"], dtype=float)
            if (self.c_grid.ndim != 1 or self.c_grid.shape != self.theta_grid.shape
                    or self.c_grid.size < 2 or np.any(np.diff(self.c_grid) <= 0)):
                raise ParameterError("joint_probability needs a strictly "
                                     "increasing c grid with matching thetas")

    @classmethod
    def constant(cls, values):
        return cls("constant", values=values)

    @classmethod
    def frank_amh_tilt(cls, alpha):
        return cls("frank_amh_tilt", alpha=alpha)

    @classmethod
    def joint_probability(cls, base, c_grid, theta_grid):
        return cls("joint_probability", base=base, c_grid=c_grid,
                   theta_grid=theta_grid)

    def resolve(self, cond_values):
        """Parameter vector (tuple of arrays) for the given conditioning
        values (a sequence, one entry per conditioning variable)."""
        cond_values = [np.asarray(c, dtype=float) for c in cond_values]
        if self.form == "constant":
            return tuple(np.asarray(v) for v in self.values)
        if self.form == "frank_amh_tilt":
            if len(cond_values) != 1:
                raise ParameterError("frank_amh_tilt expects exactly one "
                                     "conditioning value")
            return (-np.expm1(-self.alpha * cond_values[0]),)
        if len(cond_values) == 1:
            p = cond_values[0]
        elif len(cond_values) == 2:
            p = _kernel_cdf(self.base.family, cond_values[0], cond_values[1],
                            self.base.params)
        else:
            raise ParameterError("joint_probability supports at most two "
                                 "conditioning values")
        return (np.interp(p, self.c_grid, self.theta_grid),)

    def to_dict(self):
        if self.form == "constant":
            return {"constant": list(self.values)}
        if self.form == "frank_amh_tilt":
            return {"frank_amh_tilt": {"alpha": self.alpha}}
        return {"joint_probability": {
            "base_family": self.base.family,
            "base_params": list(self.base.params),
            "c_grid": self.c_grid.tolist(),
            "theta_grid": self.theta_grid.tolist()}}

    @classmethod
    def from_dict(cls, d):
        if "constant" in d:
            return cls.constant(d["constant"])
        if "frank_amh_tilt" in d:
            return cls.frank_amh_tilt(d["frank_amh_tilt"]["alpha"])
        if "joint_probability" in d:
            j = d["joint_probability"]
            base = BivariateCopulaSpec(j["base_family"],
                                       tuple(j.get("base_params", ())))
            return cls.joint_probability(base, j["c_grid"], j["theta_grid"])
        raise ParameterError(f"unrecognized parameter function: {d!r}")


class EdgeSpec:
    """One vine edge: a family tag plus its parameter function."""

    def __init__(self, family, params):
        if family not in bicop.FAMILIES:
            raise ParameterError(f"unknown copula family {family!r}")
        if isinstance(params, (list, tuple)):
            params = ParamFunction.constant(params)
        if not isinstance(params, ParamFunction):
            raise ParameterError("params must be a ParamFunction or a "
                                 "constant parameter sequence")
        self.family = family
        self.params = params
        if params.form == "constant":
            _validate_params(family, params.values)

    @property
    def is_constant(self):
        return self.params.form == "constant"

    def resolve_spec(self, cond_values=()):
        """Resolve to a plain :class:`BivariateCopulaSpec` (scalar values)."""
        vals = resolve_edge_params(self, cond_values)
        return BivariateCopulaSpec(self.family, tuple(float(v) for v in vals))

    def to_dict(self):
        return {"family": self.family, "params": self.params.to_dict()}


def resolve_edge_params(edge, cond_values):
    """Evaluate an edge's parameter function at the conditioning values
    and validate the result against the family's range."""
    parts = edge.params.resolve(tuple(np.asarray(c) for c in cond_values))
    arrs = [np.asarray(p, dtype=float) for p in parts]
    _validate_params_array(edge.family, arrs)
    if not arrs:
        return np.empty((0,))
    if len(arrs) == 1:
        return np.asarray(arrs[0])[None, ...]
    return np.stack(np.broadcast_arrays(*arrs))


def _validate_params_array(family, arrs):
    def bad(msg):
        raise ParameterError(f"{family} edge resolved out of range: {msg}")

    if family == "indep":
        if arrs and arrs[0].size:
            raise ParameterError("independence edge takes no parameters")
        return
    if family == "clayton":
        th = arrs[0]
        if np.any(th < -1) or np.any(th == 0):
            bad("theta must lie in [-1, inf) \\ {0}")
    elif family == "gumbel":
        if np.any(arrs[0] < 1):
            bad("theta must lie in [1, inf)")
    elif family == "frank":
        if np.any(arrs[0] <= 0):
            bad("alpha must be positive")
    elif family == "amh":
        if np.any((arrs[0] < 0) | (arrs[0] >= 1)):
            bad("theta must lie in [0, 1)")
    elif family == "gaussian":
        if np.any(np.abs(arrs[0]) >= 1):
            bad("rho must lie in (-1, 1)")
    elif family == "studentt":
        if np.any(np.abs(arrs[0]) >= 1) or np.any(arrs[1] <= 0):
            bad("requires rho in (-1, 1), nu > 0")
    elif family == "cuadrasauge":
        if np.any((arrs[0] < 0) | (arrs[0] > 1)):
            bad("alpha must lie in [0, 1]")


class PccSpec:
    """C-vine pair copula construction.

    ``order`` is the root ordering (0-based variable indices): tree level
    ``l`` pairs variable ``order[l-1]`` with ``order[l-1+i]`` for
    ``i = 1..dim-l``, conditioned on ``order[0..l-2]``. ``edges`` maps
    ``(level, i)`` to an :class:`EdgeSpec`.
    """

    MAX_DIM = 8

    def __init__(self, dim, order, edges):
        dim = int(dim)
        if dim < 2 or dim > self.MAX_DIM:
            raise ParameterError(f"dim must lie in [2, {self.MAX_DIM}]")
        order = tuple(int(i) for i in order)
        if sorted(order) != list(range(dim)):
            raise ParameterError("order must be a permutation of 0..dim-1")
        needed = {(lvl, i) for lvl in range(1, dim)
                  for i in range(1, dim - lvl + 1)}
        if set(edges) != needed:
            raise ParameterError(
                f"edge keys must be exactly {sorted(needed)}, "
                f"got {sorted(edges)}")
        for key, e in edges.items():
            if not isinstance(e, EdgeSpec):
                raise ParameterError(f"edge {key} is not an EdgeSpec")
        self.dim = dim
        self.order = order
        self.edges = dict(edges)

    def edge_vars(self, level, i):
        """(conditioned pair, conditioning tuple) of an edge, 0-based."""
        return ((self.order[level - 1], self.order[level - 1 + i]),
                tuple(self.order[: level - 1]))

    def to_dict(self):
        out = {"dim": self.dim, "order": [i + 1 for i in self.order],
               "edges": []}
        for lvl in range(1, self.dim):
            for i in range(1, self.dim - lvl + 1):
                pair, cond = self.edge_vars(lvl, i)
                d = {"conditioned": [pair[0] + 1, pair[1] + 1],
                     "conditioning": [c + 1 for c in cond]}
                d.update(self.edges[(lvl, i)].to_dict())
                out["edges"].append(d)
        return out

    @classmethod
    def from_dict(cls, d):
        dim = int(d["dim"])
        order = tuple(int(i) - 1 for i in d["order"])
        edges = {}
        for pos, e in enumerate(d["edges"]):
            where = f"edges[{pos}]"
            try:
                conditioned = [int(x) - 1 for x in e["conditioned"]]
                conditioning = [int(x) - 1 for x in e["conditioning"]]
            except KeyError as exc:
                raise ParameterError(f"{where}: missing field {exc}")
            level = len(conditioning) + 1
            if level < 1 or level >= dim:
                raise ParameterError(f"{where}: bad conditioning size")
            if set(conditioning) != set(order[: level - 1]):
                raise ParameterError(
                    f"{where}: conditioning set does not match the C-vine "
                    f"order {list(order)}")
            root = order[level - 1]
            if root not in conditioned or len(conditioned) != 2:
                raise ParameterError(
                    f"{where}: conditioned pair must contain tree root "
                    f"{root + 1}")
            other = conditioned[0] if conditioned[1] == root else conditioned[1]
            try:
                i = order.index(other) - (level - 1)
            except ValueError:
                raise ParameterError(f"{where}: unknown variable {other + 1}")
            if i < 1:
                raise ParameterError(f"{where}: edge pairs a root with an "
                                     "earlier root")
            try:
                edges[(level, i)] = EdgeSpec(
                    e["family"], ParamFunction.from_dict(e["params"]))
            except (KeyError, ParameterError) as exc:
                raise ParameterError(f"{where}: {exc}")
        return cls(dim, order, edges)


def trivariate_pcc(root_then_pair, edge1, edge2, edge12):
    """Convenience constructor for ``dim = 3``: ``root_then_pair`` lists
    the root variable then the two leaves (0-based); ``edge1``/``edge2``
    pair the root with each leaf and ``edge12`` is the conditioned edge."""
    order = tuple(root_then_pair)
    return PccSpec(3, order, {(1, 1): edge1, (1, 2): edge2, (2, 1): edge12})


# ---------------------------------------------------------------------------
# density / sampling / cdf
# ---------------------------------------------------------------------------

def _edge_kernel_args(spec, level, i, u_all):
    """Resolved (family, params) of an edge given raw coordinates
    ``u_all`` with shape (..., dim)."""
    edge = spec.edges[(level, i)]
    _, cond = spec.edge_vars(level, i)
    cond_values = [u_all[..., c] for c in cond]
    params = edge.params.resolve(cond_values)
    arrs = [np.asarray(p, dtype=float) for p in params]
    _validate_params_array(edge.family, arrs)
    return edge.family, arrs


def pcc_density(spec, u):
    """C-vine copula density at ``u`` (shape ``(dim,)`` or ``(n, dim)``):
    the product of all edge densities evaluated at the propagated
    conditional cdfs (uniform margins)."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != spec.dim:
        raise ParameterError(f"u must have {spec.dim} columns")
    if np.any((u <= 0) | (u >= 1)):
        raise ParameterError("density arguments must lie strictly in (0, 1)")
    d = spec.dim
    v = [clamp_unit(u[..., spec.order[j]]) for j in range(d)]
    dens = np.ones(u.shape[:-1], dtype=float)
    for lvl in range(1, d):
        root = v[0]
        nxt = []
        for i in range(1, d - lvl + 1):
            fam, params = _edge_kernel_args(spec, lvl, i, u)
            dens = dens * _kernel_pdf(fam, v[i], root, params)
            if lvl < d - 1:
                nxt.append(clamp_unit(_kernel_hfunc(fam, v[i], root, params)))
        v = nxt
    return dens[()]


def pcc_sample(spec, n, seed):
    """Draw ``n`` vine samples by inverse Rosenblatt transform.

    Deterministic given ``seed`` (Philox); non-simplified edges resolve
    their parameters per observation from the already-sampled
    conditioning coordinates.
    """
    n = int(n)
    if n < 1:
        raise ParameterError("n must be positive")
    rng = make_rng(seed)
    d = spec.dim
    w = rng.random((n, d))
    out = np.empty((n, d), dtype=float)
    # v[i][j]: conditional cdf of variable order[i] given order[0..j-1]
    v = [[None] * d for _ in range(d)]
    out[:, spec.order[0]] = w[:, 0]
    v[0][0] = w[:, 0]
    for i in range(1, d):
        t = w[:, i]
        for k in range(i - 1, -1, -1):
            fam, params = _edge_kernel_args(spec, k + 1, i - k, out)
            t = _kernel_hinv(fam, t, clamp_unit(v[k][k]), params)
        out[:, spec.order[i]] = t
        if i < d - 1:
            v[i][0] = t
            for j in range(i):
                fam, params = _edge_kernel_args(spec, j + 1, i - j, out)
                v[i][j + 1] = _kernel_hfunc(fam, clamp_unit(v[i][j]),
                                            clamp_unit(v[j][j]), params)
    return out


def pcc_cdf3(spec, u1, u2, u3, *, epsabs=1e-9):
    """Trivariate C-vine cdf by adaptive Gauss-Kronrod integration of the
    conditioned edge copula over the root variable:

    ``F(u) = int_0^{u_root} C_12|r(h(u_a | w), h(u_b | w); w) dw``.
    """
    if spec.dim != 3:
        raise ParameterError("pcc_cdf3 requires a trivariate spec")
    u = np.array([float(u1), float(u2), float(u3)])
    if np.any((u < 0) | (u > 1)):
        raise ParameterError("arguments must lie in [0, 1]")
    if np.any(u == 0):
        return 0.0
    r = spec.order[0]
    ur = u[r]
    ua = u[spec.order[1]]
    ub = u[spec.order[2]]
    e1 = spec.edges[(1, 1)]
    e2 = spec.edges[(1, 2)]
    e12 = spec.edges[(2, 1)]

    def integrand(w):
        wc = float(clamp_unit(w))
        ha = _kernel_hfunc(e1.family, ua, wc,
                           [np.asarray(p) for p in e1.params.resolve(())])
        hb = _kernel_hfunc(e2.family, ub, wc,
                           [np.asarray(p) for p in e2.params.resolve(())])
        params = [np.asarray(p, float) for p in e12.params.resolve((wc,))]
        _validate_params_array(e12.family, params)
        return float(_kernel_cdf(e12.family, ha, hb, params))

    if ua == 1.0 and ub == 1.0:
        return float(ur)
    return quad_gk(integrand, 0.0, float(ur), epsabs=epsabs, epsrel=0.0,
                   limit=200)


# ---------------------------------------------------------------------------
# conditional-copula extraction
# ---------------------------------------------------------------------------

class ConditionalCopulaGrid:
    """Numerically extracted conditional copula on a quantile lattice."""

    def __init__(self, cond_value, levels, grid):
        self.cond_value = cond_value
        self.levels = np.asarray(levels, dtype=float)
        self.grid = np.asarray(grid, dtype=float)
        self.n = self.levels.size

    def sup_distance(self, other):
        if isinstance(other, ConditionalCopulaGrid):
            other = other.grid
        return float(np.max(np.abs(self.grid - np.asarray(other))))

    def to_dict(self):
        return {"cond_value": self.cond_value,
                "levels": self.levels.tolist(),
                "grid": self.grid.tolist()}


def _as_density_callable(model):
    if isinstance(model, PccSpec):
        if model.dim != 3:
            raise ParameterError("extraction requires a trivariate model")

        def density(u1, u2, u3):
            b = np.broadcast(u1, u2, u3)
            pts = np.stack(np.broadcast_arrays(
                np.asarray(u1, float), np.asarray(u2, float),
                np.asarray(u3, float)), axis=-1)
            return pcc_density(model, pts).reshape(b.shape)

        return density
    if callable(model):
        return model
    raise ParameterError("model must be a trivariate PccSpec or a density "
                         "callable c(u1, u2, u3)")


def extract_conditional_copula(model, cond_index, cond_value, n=DEFAULT_GRID_N,
                               mesh=DEFAULT_MESH):
    """Extract the conditional copula of the two free variables of a
    trivariate copula given variable ``cond_index`` (0-based) at
    ``cond_value``.

    The conditional joint cdf is tabulated on a ``mesh x mesh`` tensor by
    cumulative trapezoid integration of the conditional density; the
    conditional margins are its boundary slices, inverted monotonically to
    place an ``n x n`` lattice on the quantile levels
    ``k/(n+1), k = 1..n``.
    """
    if n < 11:
        raise ParameterError("lattice resolution n must be at least 11")
    if not 0.0 < cond_value < 1.0:
        raise ParameterError("cond_value must lie in (0, 1)")
    density = _as_density_callable(model)
    cond_index = int(cond_index)
    if cond_index not in (0, 1, 2):
        raise ParameterError("cond_index must be 0, 1 or 2")
    rest = [j for j in range(3) if j != cond_index]
    s = np.linspace(0.0, 1.0, int(mesh))
    centers = 0.5 * (s[:-1] + s[1:])
    args = [None, None, None]
    args[rest[0]] = centers[:, None]
    args[rest[1]] = centers[None, :]
    args[cond_index] = np.float64(cond_value)
    z = np.broadcast_to(np.asarray(density(*args), dtype=float),
                        (centers.size, centers.size))
    if not np.all(np.isfinite(z)) or np.any(z < 0):
        raise ConvergenceError("conditional density is not finite and "
                               "nonnegative on the mesh")
    # midpoint-cell cumulative integral: tabulates the conditional joint
    # cdf at the nodes while never evaluating the density on the boundary,
    # where corner singularities (tail dependence) live
    h = np.diff(s)
    mass = z * h[:, None] * h[None, :]
    big = np.zeros((s.size, s.size))
    big[1:, 1:] = np.cumsum(np.cumsum(mass, axis=0), axis=1)
    total = big[-1, -1]
    if not 0.8 < total < 1.2:
        raise ConvergenceError(
            f"conditional density mass {total:.6g} is far from 1; "
            "the density is not integrable on this mesh")
    big /= total
    f1 = big[:, -1]
    f2 = big[-1, :]
    levels = np.arange(1, n + 1) / (n + 1.0)
    q1 = np.interp(levels, f1, s)
    q2 = np.interp(levels, f2, s)
    qq1, qq2 = np.meshgrid(q1, q2, indexing="ij")
    grid = bilinear(s, big, qq1, qq2)
    return ConditionalCopulaGrid(cond_value, levels, grid)


class SimplifiedCheckReport:
    """Result of :func:`simplified_assumption_check`."""

    def __init__(self, cond_index, cond_grid, grids):
        self.cond_index = cond_index
        self.cond_grid = np.asarray(cond_grid, dtype=float)
        self.grids = list(grids)
        m = len(self.grids)
        self.pairwise = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                dij = self.grids[i].sup_distance(self.grids[j])
                self.pairwise[i, j] = self.pairwise[j, i] = dij
        self.max_pairwise_sup_deviation = float(self.pairwise.max()) if m > 1 \
            else 0.0

    def to_dict(self):
        return {"cond_index": self.cond_index + 1,
                "cond_grid": self.cond_grid.tolist(),
                "max_pairwise_sup_deviation": self.max_pairwise_sup_deviation,
                "pairwise_sup_deviation": self.pairwise.tolist(),
                "grids": [g.to_dict() for g in self.grids]}


def simplified_assumption_check(model, cond_index, cond_grid=None,
                                n=DEFAULT_GRID_N, mesh=DEFAULT_MESH):
    """Extract conditional copulas along ``cond_grid`` and report the
    maximum pairwise sup-norm deviation between the lattices. A value near
    zero certifies the simplifying assumption at lattice resolution."""
    if cond_grid is None:
        cond_grid = DEFAULT_COND_GRID
    grids = [extract_conditional_copula(model, cond_index, float(x), n=n,
                                        mesh=mesh)
             for x in cond_grid]
    return SimplifiedCheckReport(int(cond_index), cond_grid, grids)


def pcc_density_mass(spec, nodes=64):
    """Integral of a trivariate C-vine density over the unit cube by
    tensor Gauss-Legendre quadrature (diagnostic)."""
    if spec.dim != 3:
        raise ParameterError("mass check requires a trivariate spec")
    x, w = gauss_legendre_01(nodes)
    g1, g2, g3 = np.meshgrid(x, x, x, indexing="ij")
    pts = np.stack([g1, g2, g3], axis=-1)
    dens = pcc_density(spec, pts.reshape(-1, 3)).reshape(g1.shape)
    return float(np.einsum("i,j,k,ijk->", w, w, w, dens))
