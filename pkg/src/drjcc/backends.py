"""Pluggable solve backends behind one synchronous contract.

The reference backend drives the HiGHS engine shipped inside scipy
(``scipy.optimize.milp`` / ``linprog``).  A pure-LP backend that rejects
binaries is provided for environments where only the LP path is wanted.
Backends are selected by name so the CLI can switch them with a flag, and
each ``solve`` call builds its own solver state; nothing is shared.

The HiGHS interface in scipy exposes no incumbent callbacks, so the
time-to-first-comparable metric is reported as unavailable (``None``)
rather than approximated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .model import ModelIR, Sense, ObjSense, VarKind, expand_piecewise

__all__ = [
    "SolveStatus",
    "SolveOptions",
    "SolveResult",
    "BackendError",
    "solve",
    "get_backend",
    "available_backends",
    "DEFAULT_BACKEND",
]


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE_TIME_LIMIT = "feasible-time-limit"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ERROR = "error"


class BackendError(RuntimeError):
    """Raised when a backend is unknown or cannot handle the model."""


@dataclass(frozen=True)
class SolveOptions:
    """Solver configuration; defaults mirror a tight research setup:
    1e-9 feasibility/optimality/integrality tolerances, 0.1% MIP gap,
    4 threads, one hour wall-clock limit."""

    time_limit_s: float = 3600.0
    mip_gap: float = 1e-3
    feasibility_tol: float = 1e-9
    integer_tol: float = 1e-9
    seed: int = 0
    threads: int = 4

    def __post_init__(self):
        if not (self.time_limit_s > 0):
            raise ValueError("time_limit_s must be positive")
        if self.feasibility_tol <= 0 or self.integer_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.mip_gap < 0:
            raise ValueError("mip_gap must be nonnegative")


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    objective: float | None = None
    x: np.ndarray | None = None
    wall_time_s: float = 0.0
    time_to_first_comparable_s: float | None = None
    gap: float = 0.0
    message: str = ""
    n_vars: int = 0
    n_rows: int = 0

    def __post_init__(self):
        has_point = self.objective is not None and self.x is not None
        ok = self.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE_TIME_LIMIT)
        if ok != has_point:
            raise ValueError("objective/incumbent present iff status is a success")

    @property
    def ok(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE_TIME_LIMIT)


def _model_arrays(model: ModelIR):
    """Flatten an expanded ModelIR to (c, A, row_lb, row_ub, bounds, integrality)."""
    n = model.n_vars
    c = np.zeros(n)
    for vid, coeff in model.obj_coeffs.items():
        c[vid] = coeff
    lb = np.array([v.lb for v in model.variables]) if n else np.zeros(0)
    ub = np.array([v.ub for v in model.variables]) if n else np.zeros(0)
    integrality = np.array(
        [1 if v.kind is VarKind.BINARY else 0 for v in model.variables], dtype=int
    )
    rows, cols, vals = [], [], []
    row_lb = np.empty(model.n_rows)
    row_ub = np.empty(model.n_rows)
    for i, row in enumerate(model.constraints):
        for vid, coeff in row.coeffs.items():
            rows.append(i)
            cols.append(vid)
            vals.append(coeff)
        if row.sense is Sense.LE:
            row_lb[i], row_ub[i] = -np.inf, row.rhs
        elif row.sense is Sense.GE:
            row_lb[i], row_ub[i] = row.rhs, np.inf
        else:
            row_lb[i] = row_ub[i] = row.rhs
    a = sp.csr_matrix((vals, (rows, cols)), shape=(model.n_rows, n))
    return c, a, row_lb, row_ub, lb, ub, integrality


_MILP_STATUS = {
    0: SolveStatus.OPTIMAL,
    1: SolveStatus.FEASIBLE_TIME_LIMIT,  # iteration or time limit
    2: SolveStatus.INFEASIBLE,
    3: SolveStatus.UNBOUNDED,
}


def _solve_lp(m: ModelIR, opts: SolveOptions) -> SolveResult:
    """LP solve via linprog/HiGHS, honoring the feasibility tolerances."""
    c, a, row_lb, row_ub, lb, ub, _ = _model_arrays(m)
    sign = 1.0 if m.obj_sense is ObjSense.MIN else -1.0
    # split two-sided rows into <= / >= for linprog
    a_ub_rows, b_ub = [], []
    a_eq_rows, b_eq = [], []
    for i in range(m.n_rows):
        if row_lb[i] == row_ub[i]:
            a_eq_rows.append(i)
            b_eq.append(row_lb[i])
        else:
            if np.isfinite(row_ub[i]):
                a_ub_rows.append((i, 1.0))
                b_ub.append(row_ub[i])
            if np.isfinite(row_lb[i]):
                a_ub_rows.append((i, -1.0))
                b_ub.append(-row_lb[i])
    a_ub = None
    if a_ub_rows:
        a_ub = sp.vstack([a[i] * s for i, s in a_ub_rows], format="csr")
    a_eq = a[a_eq_rows] if a_eq_rows else None
    res = linprog(
        sign * c,
        A_ub=a_ub,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=a_eq,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=np.column_stack([lb, ub]) if m.n_vars else None,
        method="highs",
        options={
            "time_limit": opts.time_limit_s,
            "primal_feasibility_tolerance": opts.feasibility_tol,
            "dual_feasibility_tolerance": opts.feasibility_tol,
        },
    )
    status = _MILP_STATUS.get(res.status, SolveStatus.ERROR)
    if status is SolveStatus.OPTIMAL:
        return SolveResult(
            status,
            objective=sign * float(res.fun) + m.obj_offset,
            x=np.asarray(res.x, dtype=float),
            message=str(res.message),
            n_vars=m.n_vars,
            n_rows=m.n_rows,
        )
    if status is SolveStatus.FEASIBLE_TIME_LIMIT:
        return SolveResult(
            SolveStatus.ERROR,
            message=f"limit reached: {res.message}",
            n_vars=m.n_vars,
            n_rows=m.n_rows,
        )
    return SolveResult(status, message=str(res.message), n_vars=m.n_vars, n_rows=m.n_rows)


def _solve_milp(m: ModelIR, opts: SolveOptions) -> SolveResult:
    c, a, row_lb, row_ub, lb, ub, integrality = _model_arrays(m)
    sign = 1.0 if m.obj_sense is ObjSense.MIN else -1.0
    kwargs = dict(
        c=sign * c,
        integrality=integrality,
        bounds=Bounds(lb, ub) if m.n_vars else None,
    )
    if m.n_rows:
        kwargs["constraints"] = LinearConstraint(a, row_lb, row_ub)
    options = {
        "time_limit": opts.time_limit_s,
        "disp": False,
        "mip_rel_gap": opts.mip_gap,
    }
    res = milp(**kwargs, options=options)
    status = _MILP_STATUS.get(res.status, SolveStatus.ERROR)
    if status is SolveStatus.FEASIBLE_TIME_LIMIT and res.x is None:
        # limit hit before any incumbent: undetermined, never a silent success
        return SolveResult(
            SolveStatus.ERROR,
            message=f"limit reached with no incumbent: {res.message}",
            n_vars=m.n_vars,
            n_rows=m.n_rows,
        )
    if status not in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE_TIME_LIMIT):
        return SolveResult(status, message=str(res.message), n_vars=m.n_vars, n_rows=m.n_rows)
    x = np.asarray(res.x, dtype=float)
    gap = float(getattr(res, "mip_gap", 0.0) or 0.0)
    obj = sign * float(res.fun) + m.obj_offset
    return SolveResult(
        status,
        objective=obj,
        x=x,
        gap=gap,
        message=str(res.message),
        n_vars=m.n_vars,
        n_rows=m.n_rows,
    )


class HighsBackend:
    """LP/MIP solves through the HiGHS engine bundled with scipy.

    Pure-LP models take the simplex path, which honors the configured
    feasibility tolerances; models with binaries go through the MIP solver.
    """

    name = "highs"
    supports_binaries = True

    def solve(self, model: ModelIR, opts: SolveOptions) -> SolveResult:
        m = expand_piecewise(model)
        if m.n_binary:
            return _solve_milp(m, opts)
        return _solve_lp(m, opts)


class PureLpBackend:
    """LP-only fallback; rejects any model containing binaries."""

    name = "lp"
    supports_binaries = False

    def solve(self, model: ModelIR, opts: SolveOptions) -> SolveResult:
        m = expand_piecewise(model)
        if m.n_binary:
            raise BackendError("pure-LP backend cannot handle binary variables")
        return _solve_lp(m, opts)


_BACKENDS = {b.name: b for b in (HighsBackend(), PureLpBackend())}
DEFAULT_BACKEND = "highs"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise BackendError(
            f"unknown backend {name!r}; available: {', '.join(available_backends())}"
        ) from None


def _solve_degenerate(model: ModelIR) -> SolveResult:
    """Models with no variables reduce to checking constant rows."""
    for row in model.constraints:
        ok = {
            Sense.LE: 0.0 <= row.rhs,
            Sense.GE: 0.0 >= row.rhs,
            Sense.EQ: row.rhs == 0.0,
        }[row.sense]
        if not ok:
            return SolveResult(SolveStatus.INFEASIBLE, message="constant row violated",
                               n_rows=model.n_rows)
    return SolveResult(
        SolveStatus.OPTIMAL, objective=model.obj_offset, x=np.zeros(0),
        n_rows=model.n_rows,
    )


def solve(model: ModelIR, opts: SolveOptions | None = None, backend: str | object = DEFAULT_BACKEND) -> SolveResult:
    """Solve a model with the named (or given) backend, timing the call."""
    opts = opts or SolveOptions()
    eng = get_backend(backend) if isinstance(backend, str) else backend
    t0 = time.perf_counter()
    if model.n_vars == 0:
        result = _solve_degenerate(model)
    else:
        result = eng.solve(model, opts)
    wall = time.perf_counter() - t0
    return SolveResult(
        status=result.status,
        objective=result.objective,
        x=result.x,
        wall_time_s=wall,
        time_to_first_comparable_s=result.time_to_first_comparable_s,
        gap=result.gap,
        message=result.message,
        n_vars=result.n_vars,
        n_rows=result.n_rows,
    )
