"""Builders that inject joint-chance-constraint reformulations into a host model.

Six interchangeable encodings of the same robust joint chance constraint are
supported.  Two are exact mixed-integer encodings (the plain big-M one and a
strengthened variant that adds a cardinality cut plus one valid inequality
per safety row), and four are convex inner approximations: the scenario
linear approximation, its strengthened counterpart that keeps only the
below-cutoff scenario rows, the worst-case CVaR system, and the union-bound
split into per-row worst-case VaR constraints.

Every builder receives the host model, an affine expression per safety row
describing how the decision variables enter that row, and the data objects
from :mod:`drjcc.core`.  Builders only append variables and rows; they never
touch anything that already exists in the host, so several blocks can live
side by side in one model for comparison runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .core import AmbiguityConfig, OrderData, SafetySystem, ScenarioSet, order_data
from .model import ModelIR, Sense, VarKind

__all__ = [
    "Method",
    "METHODS",
    "XExpression",
    "ReformulationBlock",
    "BonferroniVaR",
    "UnboundedVaRError",
    "build_exact_mip",
    "build_exacts",
    "build_la",
    "build_sfla",
    "build_wcvar",
    "build_bonferroni",
    "bonferroni_var",
    "compute_big_m",
    "analytic_wstar",
    "build_block",
]

METHODS = ("exact-mip", "exacts", "la", "sfla", "wcvar", "bonferroni")
CONVEX_METHODS = ("la", "sfla", "wcvar", "bonferroni")
MIP_METHODS = ("exact-mip", "exacts")


class Method:
    """Canonical method-name handling for CLI/config surfaces."""

    @staticmethod
    def parse(text: str) -> str:
        key = text.strip().lower().replace("_", "-")
        aliases = {"exactmip": "exact-mip", "exact": "exact-mip", "exact-s": "exacts"}
        key = aliases.get(key, key)
        if key not in METHODS:
            raise ValueError(f"unknown method {text!r}; supported: {', '.join(METHODS)}")
        return key


@dataclass(frozen=True)
class XExpression:
    """Per safety row, a sparse affine expression over host variables.

    ``coeffs[p]`` maps host var-id to coefficient and ``offset[p]`` is the
    constant part; together they evaluate to the row's decision-side value
    a_p . x.  For membership tests at a frozen decision the coefficient maps
    are empty and the offsets carry the numbers.
    """

    coeffs: tuple[dict[int, float], ...]
    offsets: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.offsets):
            raise ValueError("coeffs/offsets length mismatch")

    @property
    def n_rows(self) -> int:
        return len(self.coeffs)

    @staticmethod
    def fixed(values: np.ndarray) -> "XExpression":
        """Expression for a frozen decision: constants only."""
        vals = np.asarray(values, dtype=float)
        return XExpression(tuple({} for _ in vals), tuple(float(v) for v in vals))

    @staticmethod
    def from_system(sys: SafetySystem, var_ids: list[int]) -> "XExpression":
        """Expression a_p . x over explicit host variables, one per column."""
        if len(var_ids) != sys.x_dim:
            raise ValueError("var_ids length differs from decision dimension")
        coeffs = []
        for p in range(sys.n_rows):
            coeffs.append(
                {var_ids[j]: float(sys.a[p, j]) for j in range(sys.x_dim) if sys.a[p, j] != 0.0}
            )
        return XExpression(tuple(coeffs), tuple(0.0 for _ in range(sys.n_rows)))

    def value(self, p: int, x: np.ndarray) -> float:
        return self.offsets[p] + sum(c * x[v] for v, c in self.coeffs[p].items())


@dataclass
class ReformulationBlock:
    """Bookkeeping for one injected block: ids, counts, and parameters used."""

    method: str
    var_ids: dict[str, object] = field(default_factory=dict)
    constraint_ids: list[int] = field(default_factory=list)
    n_vars_added: int = 0
    n_rows_added: int = 0
    kappa: np.ndarray | None = None
    w: np.ndarray | None = None
    big_m: float | None = None
    eps_alloc: np.ndarray | None = None
    eta: np.ndarray | None = None


@dataclass(frozen=True)
class BonferroniVaR:
    """Result of one worst-case VaR computation for a single safety row."""

    eta: float
    eps_p: float
    iterations: int
    residual: float


class UnboundedVaRError(RuntimeError):
    """The VaR bracket kept expanding without reaching the target risk."""


def _check_kappa(kappa, n: int) -> np.ndarray:
    kap = np.asarray(kappa, dtype=float)
    if kap.ndim == 0:
        kap = np.full(n, float(kap))
    if kap.shape != (n,):
        raise ValueError(f"kappa must be scalar or length {n}")
    if np.any(kap < 0.0) or np.any(kap > 1.0):
        raise ValueError("kappa entries must lie in [0, 1]")
    return kap


def _row_with_x(
    base: dict[int, float], xexpr: XExpression, p: int, scale: float
) -> tuple[dict[int, float], float]:
    """Merge `scale * (a_p . x)` into a coefficient map; returns (coeffs, offset)."""
    coeffs = dict(base)
    for vid, c in xexpr.coeffs[p].items():
        coeffs[vid] = coeffs.get(vid, 0.0) + scale * c
    return coeffs, scale * xexpr.offsets[p]


def _check_xexpr(xexpr: XExpression, sys: SafetySystem) -> None:
    if xexpr.n_rows != sys.n_rows:
        raise ValueError(
            f"decision expression has {xexpr.n_rows} rows, safety system has {sys.n_rows}"
        )


def compute_big_m(sys: SafetySystem, scen: ScenarioSet) -> float:
    """Big-M from box-corner enumeration with a 5% safety factor.

    Takes the largest magnitude of the scaled row slack over all samples and
    the corners of the decision box (both the slack and its negation: the
    activation constant must dominate the largest achievable ancillary level
    and the deepest achievable violation).  Coordinates that no row touches
    may be unbounded; touched coordinates must have finite bounds.
    """
    if sys.x_bounds is None:
        raise ValueError("big-M derivation requires x bounds on the safety system")
    lo, hi = sys.x_bounds[:, 0], sys.x_bounds[:, 1]
    worst = 0.0
    for p in range(sys.n_rows):
        row = sys.a[p]
        touched = row != 0.0
        if np.any(~np.isfinite(lo[touched])) or np.any(~np.isfinite(hi[touched])):
            raise ValueError("infinite x bound on a coordinate entering a safety row")
        rt, lot, hit = row[touched], lo[touched], hi[touched]
        # componentwise corner choice maximizes/minimizes the linear term exactly
        ax_min = float(np.sum(np.where(rt > 0, rt * lot, rt * hit)))
        ax_max = float(np.sum(np.where(rt > 0, rt * hit, rt * lot)))
        proj = scen.samples @ sys.b[p]
        hi_slack = (proj.max() + sys.d[p] - ax_min) / sys.dual_norms[p]
        lo_slack = (proj.min() + sys.d[p] - ax_max) / sys.dual_norms[p]
        worst = max(worst, abs(hi_slack), abs(lo_slack))
    return max(worst, 1.0) * 1.05


def build_exact_mip(
    model: ModelIR,
    xexpr: XExpression,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    big_m: float | None = None,
) -> ReformulationBlock:
    """Exact big-M mixed-integer encoding.

    Adds 1 level variable, N slack variables, N binaries, and
    1 + N + N*P rows.
    """
    _check_xexpr(xexpr, sys)
    _check_xexpr(xexpr, sys)
    n, p_rows = scen.n, sys.n_rows
    if big_m is None:
        big_m = compute_big_m(sys, scen)
    if not (big_m > 0):
        raise ValueError("big-M must be positive")
    block = ReformulationBlock(method="exact-mip", big_m=big_m)
    s = model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, "jcc_s")
    r = [model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, f"jcc_r{i}") for i in range(n)]
    z = [model.add_variable(VarKind.BINARY, 0.0, 1.0, f"jcc_z{i}") for i in range(n)]
    block.var_ids = {"s": s, "r": r, "z": z}
    rows_before = model.n_rows
    cids = [
        model.add_row(
            {s: amb.epsilon * n, **{ri: -1.0 for ri in r}}, Sense.GE, amb.theta * n, "jcc_level"
        )
    ]
    for i in range(n):
        # M(1 - z_i) >= s - r_i
        cids.append(model.add_row({z[i]: -big_m, s: -1.0, r[i]: 1.0}, Sense.GE, -big_m))
    proj = scen.samples @ sys.b.T  # N x P
    for i in range(n):
        for p in range(p_rows):
            dn = sys.dual_norms[p]
            base = {z[i]: big_m, s: -1.0, r[i]: 1.0}
            coeffs, off = _row_with_x(base, xexpr, p, -1.0 / dn)
            rhs = -(proj[i, p] + sys.d[p]) / dn - off
            cids.append(model.add_row(coeffs, Sense.GE, rhs))
    block.constraint_ids = cids
    block.n_vars_added = 1 + 2 * n
    block.n_rows_added = model.n_rows - rows_before
    assert block.n_rows_added == 1 + n + n * p_rows
    return block


def build_exacts(
    model: ModelIR,
    xexpr: XExpression,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    big_m: float | None = None,
    order: OrderData | None = None,
) -> ReformulationBlock:
    """Strengthened exact mixed-integer encoding.

    Keeps scenario rows only for samples strictly below the per-row cutoff,
    adds the cutoff rows as valid inequalities and a cardinality cut on the
    binaries.  Adds 1 + 2N variables and 2 + N + sum_p |below_p| + P rows.
    """
    n, p_rows = scen.n, sys.n_rows
    if big_m is None:
        big_m = compute_big_m(sys, scen)
    if not (big_m > 0):
        raise ValueError("big-M must be positive")
    od = order or order_data(scen, sys, amb)
    block = ReformulationBlock(method="exacts", big_m=big_m)
    s = model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, "jcc_s")
    r = [model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, f"jcc_r{i}") for i in range(n)]
    z = [model.add_variable(VarKind.BINARY, 0.0, 1.0, f"jcc_z{i}") for i in range(n)]
    block.var_ids = {"s": s, "r": r, "z": z}
    rows_before = model.n_rows
    cids = [
        model.add_row(
            {s: amb.epsilon * n, **{ri: -1.0 for ri in r}}, Sense.GE, amb.theta * n, "jcc_level"
        ),
        model.add_row({zi: 1.0 for zi in z}, Sense.LE, float(od.k), "jcc_card"),
    ]
    for i in range(n):
        cids.append(model.add_row({z[i]: -big_m, s: -1.0, r[i]: 1.0}, Sense.GE, -big_m))
    proj = scen.samples @ sys.b.T
    for p in range(p_rows):
        dn = sys.dual_norms[p]
        for i in od.below_q[p]:
            zc = (od.q[p] - proj[i, p]) / dn
            base = {z[int(i)]: zc, s: -1.0, r[int(i)]: 1.0}
            coeffs, off = _row_with_x(base, xexpr, p, -1.0 / dn)
            rhs = -(proj[i, p] + sys.d[p]) / dn - off
            cids.append(model.add_row(coeffs, Sense.GE, rhs))
    for p in range(p_rows):
        dn = sys.dual_norms[p]
        coeffs, off = _row_with_x({s: -1.0}, xexpr, p, -1.0 / dn)
        rhs = -(od.q[p] + sys.d[p]) / dn - off
        cids.append(model.add_row(coeffs, Sense.GE, rhs, f"jcc_q{p}"))
    block.constraint_ids = cids
    block.n_vars_added = 1 + 2 * n
    block.n_rows_added = model.n_rows - rows_before
    assert block.n_rows_added == 2 + n + od.n_below + p_rows
    return block


def build_la(
    model: ModelIR,
    xexpr: XExpression,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    kappa=1.0,
) -> ReformulationBlock:
    """Scenario linear inner approximation: 1 + N*P rows, 1 + N variables."""
    _check_xexpr(xexpr, sys)
    n, p_rows = scen.n, sys.n_rows
    kap = _check_kappa(kappa, n)
    block = ReformulationBlock(method="la", kappa=kap)
    s = model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, "jcc_s")
    r = [model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, f"jcc_r{i}") for i in range(n)]
    block.var_ids = {"s": s, "r": r}
    rows_before = model.n_rows
    cids = [
        model.add_row(
            {s: amb.epsilon * n, **{ri: -1.0 for ri in r}}, Sense.GE, amb.theta * n, "jcc_level"
        )
    ]
    proj = scen.samples @ sys.b.T
    for i in range(n):
        for p in range(p_rows):
            dn = sys.dual_norms[p]
            base = {s: -1.0, r[i]: 1.0}
            coeffs, off = _row_with_x(base, xexpr, p, -kap[i] / dn)
            rhs = -kap[i] * (proj[i, p] + sys.d[p]) / dn - off
            cids.append(model.add_row(coeffs, Sense.GE, rhs))
    block.constraint_ids = cids
    block.n_vars_added = 1 + n
    block.n_rows_added = model.n_rows - rows_before
    assert block.n_rows_added == 1 + n * p_rows
    return block


def build_sfla(
    model: ModelIR,
    xexpr: XExpression,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    kappa=1.0,
    order: OrderData | None = None,
) -> ReformulationBlock:
    """Strengthened linear inner approximation.

    Scenario rows survive only for samples strictly below the per-row cutoff
    value, and one cutoff row per safety row caps the level variable:
    1 + sum_p |below_p| + P rows, 1 + N variables, no binaries.
    """
    _check_xexpr(xexpr, sys)
    n, p_rows = scen.n, sys.n_rows
    kap = _check_kappa(kappa, n)
    od = order or order_data(scen, sys, amb)
    block = ReformulationBlock(method="sfla", kappa=kap)
    s = model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, "jcc_s")
    r = [model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, f"jcc_r{i}") for i in range(n)]
    block.var_ids = {"s": s, "r": r}
    rows_before = model.n_rows
    cids = [
        model.add_row(
            {s: amb.epsilon * n, **{ri: -1.0 for ri in r}}, Sense.GE, amb.theta * n, "jcc_level"
        )
    ]
    proj = scen.samples @ sys.b.T
    for p in range(p_rows):
        dn = sys.dual_norms[p]
        for i in od.below_q[p]:
            i = int(i)
            base = {s: -1.0, r[i]: 1.0}
            coeffs, off = _row_with_x(base, xexpr, p, -kap[i] / dn)
            rhs = -kap[i] * (proj[i, p] + sys.d[p]) / dn - off
            cids.append(model.add_row(coeffs, Sense.GE, rhs))
    for p in range(p_rows):
        dn = sys.dual_norms[p]
        coeffs, off = _row_with_x({s: -1.0}, xexpr, p, -1.0 / dn)
        rhs = -(od.q[p] + sys.d[p]) / dn - off
        cids.append(model.add_row(coeffs, Sense.GE, rhs, f"jcc_q{p}"))
    block.constraint_ids = cids
    block.n_vars_added = 1 + n
    block.n_rows_added = model.n_rows - rows_before
    assert block.n_rows_added == 1 + od.n_below + p_rows
    return block


def analytic_wstar(sys: SafetySystem) -> np.ndarray:
    """Row weights proportional to inverse dual norms (sums to one)."""
    inv = 1.0 / sys.dual_norms
    return inv / inv.sum()


def build_wcvar(
    model: ModelIR,
    xexpr: XExpression,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    w=None,
) -> ReformulationBlock:
    """Worst-case CVaR system: 1 + N*P + P rows, N + 2 variables.

    ``w`` must live on the open probability simplex; default is uniform.
    """
    _check_xexpr(xexpr, sys)
    n, p_rows = scen.n, sys.n_rows
    if w is None:
        wv = np.full(p_rows, 1.0 / p_rows)
    else:
        wv = np.asarray(w, dtype=float)
    if wv.shape != (p_rows,):
        raise ValueError(f"w must have one entry per safety row ({p_rows})")
    if np.any(wv <= 0.0) or (p_rows > 1 and np.any(wv >= 1.0)):
        raise ValueError("w must lie strictly inside the probability simplex")
    if abs(wv.sum() - 1.0) > 1e-9:
        raise ValueError("w must sum to one")
    block = ReformulationBlock(method="wcvar", w=wv)
    alpha = [model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, f"jcc_a{i}") for i in range(n)]
    beta = model.add_variable(VarKind.CONTINUOUS, -math.inf, math.inf, "jcc_beta")
    tau = model.add_variable(VarKind.CONTINUOUS, -math.inf, math.inf, "jcc_tau")
    block.var_ids = {"alpha": alpha, "beta": beta, "tau": tau}
    rows_before = model.n_rows
    inv_eps_n = 1.0 / (amb.epsilon * n)
    cids = [
        model.add_row(
            {tau: 1.0, beta: amb.theta / amb.epsilon, **{ai: inv_eps_n for ai in alpha}},
            Sense.LE,
            0.0,
            "jcc_cvar",
        )
    ]
    proj = scen.samples @ sys.b.T
    for i in range(n):
        for p in range(p_rows):
            # alpha_i >= w_p (a_p.x - b_p.xi_i - d_p) - tau
            base = {alpha[i]: 1.0, tau: 1.0}
            coeffs, off = _row_with_x(base, xexpr, p, -wv[p])
            rhs = -wv[p] * (proj[i, p] + sys.d[p]) - off
            cids.append(model.add_row(coeffs, Sense.GE, rhs))
    for p in range(p_rows):
        cids.append(
            model.add_row({beta: 1.0}, Sense.GE, wv[p] * sys.dual_norms[p], f"jcc_w{p}")
        )
    block.constraint_ids = cids
    block.n_vars_added = n + 2
    block.n_rows_added = model.n_rows - rows_before
    assert block.n_rows_added == 1 + n * p_rows + p_rows
    return block


def _var_lp_value(eta: float, proj: np.ndarray, dual: float, theta: float) -> float:
    """Risk envelope g(eta) for one safety row: an LP in (alpha, m, beta).

    minimize   theta*beta + mean(alpha)
    subject to alpha_i + c_i * m_i >= 1,  beta >= dual * m_i,
               alpha, m >= 0,             with c_i = eta + proj_i.
    """
    n = proj.size
    c_i = eta + proj
    # variable order: alpha (n), m (n), beta
    cost = np.concatenate([np.full(n, 1.0 / n), np.zeros(n), [theta]])
    rows, cols, vals = [], [], []
    for i in range(n):
        rows += [i, i]
        cols += [i, n + i]
        vals += [1.0, c_i[i]]
    for i in range(n):
        rows += [n + i, n + i]
        cols += [2 * n, n + i]
        vals += [1.0, -dual]
    a = sp.csr_matrix((vals, (rows, cols)), shape=(2 * n, 2 * n + 1))
    lb = np.concatenate([np.full(n, 1.0), np.zeros(n)])
    res = linprog(
        cost,
        A_ub=-a,
        b_ub=-lb,
        bounds=[(0, None)] * (2 * n) + [(0, None)],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"risk-envelope LP failed: {res.message}")
    return float(res.fun)


def bonferroni_var(
    scen: ScenarioSet,
    sys: SafetySystem,
    row: int,
    amb: AmbiguityConfig,
    eps_p: float,
    tol: float = 1e-7,
    max_doublings: int = 60,
) -> BonferroniVaR:
    """Worst-case value-at-risk of one safety row at sub-risk ``eps_p``.

    Returns the smallest eta with g(eta) <= eps_p, where g is the
    nonincreasing risk envelope evaluated by LP; found by bisection after a
    geometric bracket expansion.  Raises :class:`UnboundedVaRError` when the
    upper bracket keeps failing after ``max_doublings`` expansions.
    """
    if eps_p <= 0:
        raise ValueError("eps_p must be positive")
    proj = scen.samples @ sys.b[row]
    dual = float(sys.dual_norms[row])

    def g(eta: float) -> float:
        return _var_lp_value(eta, proj, dual, amb.theta)

    # centre the bracket on the empirical quantile of the negated projection
    losses = np.sort(-proj)[::-1]
    k_p = int(math.floor(eps_p * proj.size + 1e-9))
    centre = float(losses[min(k_p, proj.size - 1)])
    span = max(1.0, abs(centre))
    hi = centre + span
    expansions = 0
    while g(hi) > eps_p:
        expansions += 1
        if expansions > max_doublings:
            raise UnboundedVaRError(
                f"risk envelope stayed above {eps_p:g} after {max_doublings} doublings"
            )
        span *= 2.0
        hi = centre + span
    lo = centre - span
    guard = 0
    while g(lo) <= eps_p:
        lo_prev = lo
        span *= 2.0
        lo = centre - span
        guard += 1
        if guard > max_doublings:
            # g <= eps_p everywhere we looked: VaR is effectively -inf; report
            # the lowest probe rather than looping forever.
            return BonferroniVaR(eta=lo_prev, eps_p=eps_p, iterations=guard, residual=0.0)
    iters = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) <= eps_p:
            hi = mid
        else:
            lo = mid
        iters += 1
    return BonferroniVaR(eta=hi, eps_p=eps_p, iterations=iters, residual=float(g(hi) - eps_p))


def build_bonferroni(
    model: ModelIR,
    xexpr: XExpression,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    eps_alloc=None,
    eta: np.ndarray | None = None,
) -> ReformulationBlock:
    """Union-bound split: P pure rows ``a_p . x <= d_p - eta_p``, no new variables.

    The sub-risk allocation defaults to epsilon/P and must sum to at most
    epsilon.  Precomputed VaR values can be passed to skip the bisection.
    """
    _check_xexpr(xexpr, sys)
    p_rows = sys.n_rows
    if eps_alloc is None:
        alloc = np.full(p_rows, amb.epsilon / p_rows)
    else:
        alloc = np.asarray(eps_alloc, dtype=float)
    if alloc.shape != (p_rows,) or np.any(alloc <= 0.0):
        raise ValueError("eps allocation must be positive per row")
    if alloc.sum() > amb.epsilon + 1e-12:
        raise ValueError("eps allocation exceeds the total risk budget")
    if eta is None:
        eta = np.array(
            [bonferroni_var(scen, sys, p, amb, alloc[p]).eta for p in range(p_rows)]
        )
    block = ReformulationBlock(method="bonferroni", eps_alloc=alloc, eta=np.asarray(eta))
    rows_before = model.n_rows
    cids = []
    for p in range(p_rows):
        coeffs, off = _row_with_x({}, xexpr, p, 1.0)
        cids.append(
            model.add_row(coeffs, Sense.LE, sys.d[p] - eta[p] - off, f"jcc_bonf{p}")
        )
    block.constraint_ids = cids
    block.n_vars_added = 0
    block.n_rows_added = model.n_rows - rows_before
    assert block.n_rows_added == p_rows
    return block


def build_block(
    model: ModelIR,
    method: str,
    xexpr: XExpression,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    kappa=1.0,
    w=None,
    eps_alloc=None,
    big_m: float | None = None,
    eta: np.ndarray | None = None,
) -> ReformulationBlock:
    """Dispatch a builder by canonical method name."""
    method = Method.parse(method)
    if method == "exact-mip":
        return build_exact_mip(model, xexpr, scen, sys, amb, big_m)
    if method == "exacts":
        return build_exacts(model, xexpr, scen, sys, amb, big_m)
    if method == "la":
        return build_la(model, xexpr, scen, sys, amb, kappa)
    if method == "sfla":
        return build_sfla(model, xexpr, scen, sys, amb, kappa)
    if method == "wcvar":
        return build_wcvar(model, xexpr, scen, sys, amb, w)
    return build_bonferroni(model, xexpr, scen, sys, amb, eps_alloc, eta)
