"""Ground-truth feasibility oracle, fixed-decision membership tests, and the
region-comparison harness.

The oracle decides membership in the exact robust feasible region without a
solver: the level objective ``eps*N*s - sum max(0, s - dist_i)`` is concave
piecewise-linear in s and is maximized at the (k+1)-th smallest sample
distance, so a single sort settles the question.  Membership in each
approximation is decided the honest way, by solving the ancillary-variable
system with the decision frozen; a slack variable added to every row turns
the feasibility solve into a signed margin, which the comparison harness
uses to exclude borderline points instead of producing tolerance artifacts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import reformulations as ref
from .backends import SolveOptions, SolveStatus, solve
from .core import AmbiguityConfig, SafetySystem, ScenarioSet, distance_profile
from .model import ModelIR, ObjSense, Sense, VarKind

__all__ = [
    "exact_feasible",
    "membership",
    "membership_margin",
    "reliability",
    "in_sample_violations",
    "MembershipReport",
    "RegionComparison",
    "compare_regions",
    "default_x_sampler",
    "BORDER_TOL",
]

# Points whose margin to a region boundary is below this are excluded from
# inclusion assertions; chosen above the backend feasibility tolerance.
BORDER_TOL = 1e-6

# Margins are capped here; "at least this safe" is all the harness needs.
_MARGIN_CAP = 1.0

ALL_METHODS = ("exact-mip", "exacts", "la", "sfla", "wcvar", "bonferroni")


def exact_feasible(
    x: np.ndarray,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
) -> tuple[bool, float]:
    """Exact membership check; returns (feasible, optimal level s*).

    s* is the (k+1)-th smallest sample distance; feasibility holds iff
    ``eps*N*s* - sum_i max(0, s* - dist_i) >= theta*N``.
    """
    dists = distance_profile(x, scen, sys)
    k = amb.k(scen.n)
    s_star = float(np.partition(dists, k)[k])
    value = amb.epsilon * scen.n * s_star - float(np.maximum(0.0, s_star - dists).sum())
    return value >= amb.theta * scen.n, s_star


def exact_margin(
    x: np.ndarray, scen: ScenarioSet, sys: SafetySystem, amb: AmbiguityConfig
) -> float:
    """Signed slack of the oracle criterion, normalized per sample."""
    dists = distance_profile(x, scen, sys)
    k = amb.k(scen.n)
    s_star = float(np.partition(dists, k)[k])
    value = amb.epsilon * scen.n * s_star - float(np.maximum(0.0, s_star - dists).sum())
    return (value - amb.theta * scen.n) / scen.n


def _margin_model(
    method: str,
    x: np.ndarray,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    kappa,
    w,
    eps_alloc,
    big_m,
    eta,
) -> ModelIR:
    """Feasibility system at frozen x with a uniform slack variable t.

    Every inequality row is tightened by t and t is maximized, so the block
    is feasible iff the optimum is >= 0.  Relaxing t always restores
    feasibility, hence the model is never infeasible and the optimum is a
    signed margin (capped above).
    """
    model = ModelIR(ObjSense.MAX, name=f"membership-{method}")
    t = model.add_variable(VarKind.CONTINUOUS, -math.inf, _MARGIN_CAP, "t")
    model.set_objective_coeff(t, 1.0)
    xexpr = ref.XExpression.fixed(sys.row_values(x))
    if big_m is None and method in ref.MIP_METHODS:
        # widen the box to cover the queried point so the derived activation
        # constant stays valid even for out-of-box decisions
        if sys.x_bounds is not None:
            widened = np.column_stack(
                [np.minimum(sys.x_bounds[:, 0], x), np.maximum(sys.x_bounds[:, 1], x)]
            )
            sys_m = SafetySystem(a=sys.a, b=sys.b, d=sys.d, norm=sys.norm, x_bounds=widened)
            big_m = ref.compute_big_m(sys_m, scen)
    block = ref.build_block(
        model, method, xexpr, scen, sys, amb,
        kappa=kappa, w=w, eps_alloc=eps_alloc, big_m=big_m, eta=eta,
    )
    for cid in block.constraint_ids:
        row = model.constraints[cid]
        shift = 1.0 if row.sense is Sense.GE else -1.0
        coeffs = dict(row.coeffs)
        coeffs[t] = coeffs.get(t, 0.0) - shift
        model.constraints[cid] = type(row)(coeffs, row.sense, row.rhs, row.name)
    return model


def membership_margin(
    x: np.ndarray,
    method: str,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    *,
    kappa=1.0,
    w=None,
    eps_alloc=None,
    big_m=None,
    eta=None,
    backend: str = "highs",
    options: SolveOptions | None = None,
) -> tuple[bool, float]:
    """Membership of a frozen decision plus a signed feasibility margin."""
    method = ref.Method.parse(method)
    if method == "bonferroni" and eta is not None:
        # pure row check once the VaR levels are known
        vals = sys.row_values(x)
        margin = float(np.min(sys.d - np.asarray(eta) - vals))
        return margin >= 0.0, min(margin, _MARGIN_CAP)
    model = _margin_model(method, x, scen, sys, amb, kappa, w, eps_alloc, big_m, eta)
    opts = options or SolveOptions(time_limit_s=60.0)
    res = solve(model, opts, backend=backend)
    if res.status is not SolveStatus.OPTIMAL:
        raise RuntimeError(f"membership solve failed ({method}): {res.status.value} {res.message}")
    margin = float(res.objective)
    return margin >= 0.0, margin


def membership(
    x: np.ndarray,
    method: str,
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    **kwargs,
) -> bool:
    """Frozen-decision membership for any reformulation (LP or MIP solve)."""
    member, _ = membership_margin(x, method, scen, sys, amb, **kwargs)
    return member


def reliability(x: np.ndarray, holdout: np.ndarray, sys: SafetySystem) -> float:
    """Fraction of held-out samples satisfying every safety row at x (weak)."""
    holdout = np.atleast_2d(np.asarray(holdout, dtype=float))
    if holdout.shape[0] == 0:
        raise ValueError("holdout must be nonempty")
    vals = sys.row_values(x)
    ok = (holdout @ sys.b.T + sys.d) >= vals  # M x P
    return float(np.all(ok, axis=1).mean())


def in_sample_violations(
    x: np.ndarray, scen: ScenarioSet, sys: SafetySystem, tol: float = 1e-9
) -> int:
    """Number of training samples at zero distance (boundary counts as hit)."""
    dists = distance_profile(x, scen, sys)
    return int(np.sum(dists <= tol))


@dataclass
class MembershipReport:
    """All membership verdicts for one decision point."""

    x: np.ndarray
    members: dict[str, bool]
    margins: dict[str, float]
    dists: np.ndarray
    s_star: float

    def as_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "members": {k: bool(v) for k, v in self.members.items()},
            "margins": {k: float(v) for k, v in self.margins.items()},
            "s_star": float(self.s_star),
        }


@dataclass
class RegionComparison:
    """Sampled comparison of the feasible regions of all methods."""

    descriptor: str
    n_samples: int
    acceptance: dict[str, int] = field(default_factory=dict)
    counterexamples: list[dict] = field(default_factory=list)
    dominance_witnesses: list[list[float]] = field(default_factory=list)
    borderline: int = 0
    reports: list[MembershipReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self, **kwargs) -> str:
        payload = {
            "descriptor": self.descriptor,
            "n_samples": self.n_samples,
            "acceptance": self.acceptance,
            "counterexamples": self.counterexamples,
            "dominance_witnesses": self.dominance_witnesses,
            "borderline": self.borderline,
            "passed": self.passed,
            "reports": [r.as_dict() for r in self.reports],
        }
        return json.dumps(payload, **kwargs)


def default_x_sampler(sys: SafetySystem, scen, amb, kappa, rng: np.random.Generator):
    """Uniform box sampler with one tenth of draws bisected onto the
    boundary of the scenario-approximation region to stress the chain."""
    if sys.x_bounds is None:
        raise ValueError("sampling requires x bounds")
    lo, hi = sys.x_bounds[:, 0], sys.x_bounds[:, 1]

    def la_member(x):
        m, _ = membership_margin(x, "la", scen, sys, amb, kappa=kappa)
        return m

    def draw(n: int):
        points = []
        n_edge = n // 10
        for j in range(n):
            x = rng.uniform(lo, hi)
            if j >= n - n_edge:
                y = rng.uniform(lo, hi)
                mx, my = la_member(x), la_member(y)
                if mx != my:
                    inside, outside = (x, y) if mx else (y, x)
                    for _ in range(8):
                        mid = 0.5 * (inside + outside)
                        if la_member(mid):
                            inside = mid
                        else:
                            outside = mid
                    x = 0.5 * (inside + outside)
            points.append(x)
        return points

    return draw


# ordered inclusion pairs: member of `inner` must be member of `outer`
_INCLUSION_PAIRS = (
    ("la", "sfla"),
    ("sfla", "exact-oracle"),
    ("bonferroni", "exact-oracle"),
    ("wcvar", "exact-oracle"),
)


def compare_regions(
    scen: ScenarioSet,
    sys: SafetySystem,
    amb: AmbiguityConfig,
    n_samples: int = 200,
    kappa=1.0,
    w=None,
    methods: tuple[str, ...] = ("la", "sfla", "wcvar", "bonferroni"),
    x_sampler=None,
    seed: int = 0,
    keep_reports: bool = False,
    descriptor: str = "",
) -> RegionComparison:
    """Evaluate memberships on sampled decisions and check the inclusion chain.

    Any robust violation of an inclusion pair (inner member with margin above
    the border band while the outer rejects below it) is recorded as a hard
    counterexample; borderline points only bump a counter.  Decisions inside
    the strengthened region but outside the plain scenario approximation are
    collected as dominance witnesses.
    """
    rng = np.random.default_rng(seed)
    sampler = x_sampler or default_x_sampler(sys, scen, amb, kappa, rng)
    comp = RegionComparison(
        descriptor=descriptor
        or f"P={sys.n_rows} K={sys.xi_dim} N={scen.n} eps={amb.epsilon} theta={amb.theta}",
        n_samples=n_samples,
    )
    eta = None
    if "bonferroni" in methods:
        try:
            eta = np.array(
                [
                    ref.bonferroni_var(scen, sys, p, amb, amb.epsilon / sys.n_rows).eta
                    for p in range(sys.n_rows)
                ]
            )
        except ref.UnboundedVaRError:
            methods = tuple(m for m in methods if m != "bonferroni")
    counts = {m: 0 for m in (*methods, "exact-oracle")}
    for x in sampler(n_samples):
        members: dict[str, bool] = {}
        margins: dict[str, float] = {}
        feas, s_star = exact_feasible(x, scen, sys, amb)
        members["exact-oracle"] = feas
        margins["exact-oracle"] = exact_margin(x, scen, sys, amb)
        for m in methods:
            members[m], margins[m] = membership_margin(
                x, m, scen, sys, amb, kappa=kappa, w=w, eta=eta
            )
        for m, is_in in members.items():
            if is_in:
                counts[m] += 1
        borderline = any(abs(v) < BORDER_TOL for v in margins.values())
        if borderline:
            comp.borderline += 1
        else:
            for inner, outer in _INCLUSION_PAIRS:
                if inner in margins and outer in margins:
                    if margins[inner] >= BORDER_TOL and margins[outer] <= -BORDER_TOL:
                        comp.counterexamples.append(
                            {
                                "x": [float(v) for v in x],
                                "pair": [inner, outer],
                                "margins": {inner: margins[inner], outer: margins[outer]},
                            }
                        )
            if (
                "sfla" in margins
                and "la" in margins
                and margins["sfla"] >= BORDER_TOL
                and margins["la"] <= -BORDER_TOL
            ):
                comp.dominance_witnesses.append([float(v) for v in x])
        if keep_reports:
            comp.reports.append(
                MembershipReport(
                    np.asarray(x, dtype=float), members, margins,
                    distance_profile(x, scen, sys), s_star,
                )
            )
    comp.acceptance = counts
    return comp
