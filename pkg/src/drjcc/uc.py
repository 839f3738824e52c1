"""Desk-scale chance-constrained unit commitment benchmark.

The instance family is deliberately small (3-bus and 6-bus DC networks, a
handful of thermal units, two or three wind farms) so that every method,
including the exact mixed-integer encodings, solves in seconds; what the
benchmark exercises is the *structure* of a commitment problem: binary
on/off decisions with minimum up/down times, ramping, piecewise-linearized
quadratic fuel cost, reserve procurement, wind curtailment, and one joint
chance constraint tying reserves and line flows to the stacked wind
forecast errors.

The joint rows, with xi the stacked error vector (farm-major, time-minor):

* per period: total upward reserve covers the negative total error plus an
  extra margin; total downward reserve covers the positive total error;
* per (line, period): the PTDF flow stays within the limit in both
  directions under the error-shifted wind injections.

That yields P = T * (2 + 2L) rows on K = J * T uncertain coordinates.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass, replace

import numpy as np

from . import reformulations as ref
from .backends import SolveOptions, solve
from .core import AmbiguityConfig, NormKind, SafetySystem, ScenarioSet
from .data_io import SynthSpec, synth_scenarios, write_csv_table
from .model import ModelIR, ObjSense, PiecewiseTerm, Sense, VarKind
from .oracle import reliability as oracle_reliability

__all__ = [
    "UCConfig",
    "UCModel",
    "UCBuildReport",
    "PRESETS",
    "generate_uc_instance",
    "build_uc_model",
    "run_benchmark",
    "BENCH_COLUMNS",
]


@dataclass(frozen=True)
class UCConfig:
    """Complete data of one commitment instance (all arrays time-resolved)."""

    name: str
    horizon: int                 # T
    n_gens: int                  # G
    n_wind: int                  # J
    n_loads: int                 # K_load
    n_lines: int                 # L
    ptdf_gen: np.ndarray         # L x G
    ptdf_wind: np.ndarray        # L x J
    ptdf_load: np.ndarray        # L x K_load
    line_limit: np.ndarray       # L
    p_max: np.ndarray            # G
    p_min: np.ndarray            # G
    ramp_up: np.ndarray          # G
    ramp_dn: np.ndarray          # G
    t_up: np.ndarray             # G (integer hours)
    t_dn: np.ndarray             # G
    cost_quad: np.ndarray        # G  ($/MW^2 h)
    cost_lin: np.ndarray         # G  ($/MWh)
    cost_fix: np.ndarray         # G  ($/h while on)
    cost_startup: np.ndarray     # G
    cost_shutdown: np.ndarray    # G
    cost_reserve: np.ndarray     # G  ($/MW)
    r_up_max: np.ndarray         # G
    r_dn_max: np.ndarray         # G
    wind_forecast: np.ndarray    # J x T
    cost_curtail: float
    demand: np.ndarray           # K_load x T
    reserve_extra_up: np.ndarray  # T
    reserve_extra_dn: np.ndarray  # T
    fuel_segments: int = 3
    error_sigma: float = 4.5
    error_rho: float = 0.6
    v_init: np.ndarray | None = None
    p_init: np.ndarray | None = None

    @property
    def n_joint_rows(self) -> int:
        return self.horizon * (2 + 2 * self.n_lines)

    @property
    def xi_dim(self) -> int:
        return self.n_wind * self.horizon

    def peak_load(self) -> float:
        return float(self.demand.sum(axis=0).max())


def _ptdf(n_bus: int, lines: list[tuple[int, int, float]], slack: int) -> np.ndarray:
    """Power transfer distribution factors of a DC network.

    ``lines`` holds (from_bus, to_bus, reactance); the slack column is zero.
    """
    n_l = len(lines)
    a = np.zeros((n_l, n_bus))
    binv = np.zeros(n_l)
    for idx, (f, t, x) in enumerate(lines):
        a[idx, f] = 1.0
        a[idx, t] = -1.0
        binv[idx] = 1.0 / x
    bbus = a.T @ np.diag(binv) @ a
    keep = [i for i in range(n_bus) if i != slack]
    red = np.linalg.inv(bbus[np.ix_(keep, keep)])
    full = np.zeros((n_bus, n_bus))
    full[np.ix_(keep, keep)] = red
    return np.diag(binv) @ a @ full


# 24-hour shapes sampled by start hour; scaled by instance peaks.
_DAY_LOAD = np.array(
    [0.66, 0.62, 0.60, 0.59, 0.61, 0.67, 0.76, 0.86, 0.92, 0.95, 0.97, 0.96,
     0.94, 0.92, 0.93, 0.95, 0.98, 1.00, 0.99, 0.94, 0.87, 0.79, 0.73, 0.69]
)
_DAY_WIND = np.array(
    [0.82, 0.85, 0.88, 0.90, 0.86, 0.80, 0.72, 0.64, 0.58, 0.55, 0.52, 0.50,
     0.52, 0.55, 0.58, 0.62, 0.66, 0.70, 0.74, 0.78, 0.80, 0.82, 0.84, 0.83]
)


def _tiny_base() -> UCConfig:
    lines = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]
    ptdf = _ptdf(3, lines, slack=2)
    gen_bus = [0, 1, 2]
    wind_bus = [0, 1]
    load_bus = [1, 2]
    load_peak = np.array([140.0, 120.0])
    wind_cap = np.array([45.0, 35.0])
    peak = load_peak.sum()
    return UCConfig(
        name="tiny",
        horizon=8,
        n_gens=3,
        n_wind=2,
        n_loads=2,
        n_lines=3,
        ptdf_gen=ptdf[:, gen_bus].copy(),
        ptdf_wind=ptdf[:, wind_bus].copy(),
        ptdf_load=ptdf[:, load_bus].copy(),
        line_limit=np.array([150.0, 150.0, 150.0]),
        p_max=np.array([120.0, 100.0, 80.0]),
        p_min=np.array([24.0, 20.0, 16.0]),
        ramp_up=np.array([60.0, 50.0, 40.0]),
        ramp_dn=np.array([60.0, 50.0, 40.0]),
        t_up=np.array([2, 2, 2]),
        t_dn=np.array([1, 1, 1]),
        cost_quad=np.array([0.015, 0.020, 0.025]),
        cost_lin=np.array([18.0, 22.0, 26.0]),
        cost_fix=np.array([90.0, 70.0, 50.0]),
        cost_startup=np.array([450.0, 320.0, 180.0]),
        cost_shutdown=np.array([60.0, 45.0, 30.0]),
        cost_reserve=np.array([4.0, 5.0, 6.0]),
        r_up_max=np.array([40.0, 35.0, 30.0]),
        r_dn_max=np.array([40.0, 35.0, 30.0]),
        wind_forecast=np.outer(wind_cap, np.ones(8)),  # shaped per seed
        cost_curtail=80.0,
        demand=np.outer(load_peak, np.ones(8)),  # shaped per seed
        reserve_extra_up=np.full(8, 0.02 * peak),
        reserve_extra_dn=np.full(8, 0.02 * peak),
        error_sigma=4.5,
        error_rho=0.6,
    )


def _small_base() -> UCConfig:
    lines = [
        (0, 1, 0.20), (0, 3, 0.20), (1, 2, 0.25), (1, 3, 0.10),
        (2, 5, 0.30), (3, 4, 0.15), (4, 5, 0.20),
    ]
    ptdf = _ptdf(6, lines, slack=5)
    gen_bus = [0, 1, 2, 3, 4, 5]
    wind_bus = [0, 2, 4]
    load_bus = [1, 3, 5]
    load_peak = np.array([170.0, 150.0, 130.0])
    wind_cap = np.array([55.0, 45.0, 40.0])
    peak = load_peak.sum()
    return UCConfig(
        name="small",
        horizon=12,
        n_gens=6,
        n_wind=3,
        n_loads=3,
        n_lines=7,
        ptdf_gen=ptdf[:, gen_bus].copy(),
        ptdf_wind=ptdf[:, wind_bus].copy(),
        ptdf_load=ptdf[:, load_bus].copy(),
        line_limit=np.full(7, 220.0),
        p_max=np.array([130.0, 110.0, 95.0, 85.0, 75.0, 65.0]),
        p_min=np.array([26.0, 22.0, 19.0, 17.0, 15.0, 13.0]),
        ramp_up=np.array([65.0, 55.0, 48.0, 43.0, 38.0, 33.0]),
        ramp_dn=np.array([65.0, 55.0, 48.0, 43.0, 38.0, 33.0]),
        t_up=np.array([2, 2, 2, 2, 2, 2]),
        t_dn=np.array([1, 1, 1, 1, 1, 1]),
        cost_quad=np.array([0.012, 0.015, 0.018, 0.021, 0.024, 0.028]),
        cost_lin=np.array([17.0, 19.0, 21.0, 23.0, 25.0, 27.0]),
        cost_fix=np.array([95.0, 85.0, 75.0, 65.0, 55.0, 45.0]),
        cost_startup=np.array([480.0, 420.0, 360.0, 300.0, 240.0, 180.0]),
        cost_shutdown=np.array([65.0, 55.0, 48.0, 40.0, 33.0, 26.0]),
        cost_reserve=np.array([3.5, 4.0, 4.5, 5.0, 5.5, 6.0]),
        r_up_max=np.array([45.0, 40.0, 35.0, 30.0, 27.0, 24.0]),
        r_dn_max=np.array([45.0, 40.0, 35.0, 30.0, 27.0, 24.0]),
        wind_forecast=np.outer(wind_cap, np.ones(12)),
        cost_curtail=80.0,
        demand=np.outer(load_peak, np.ones(12)),
        reserve_extra_up=np.full(12, 0.02 * peak),
        reserve_extra_dn=np.full(12, 0.02 * peak),
        error_sigma=5.0,
        error_rho=0.6,
    )


PRESETS = {"tiny": _tiny_base, "small": _small_base}


def generate_uc_instance(
    preset: str,
    seed: int,
    n_scenarios: int = 20,
    n_holdout: int = 2000,
) -> tuple[UCConfig, ScenarioSet]:
    """Instantiate a preset with seeded randomization.

    Per seed: cost coefficients move uniformly within +-20% of the preset
    base, the simulation start hour is drawn from the 24-hour cycle (shifting
    demand and wind shapes), and fresh correlated wind-error scenarios plus a
    holdout batch are generated.  Identical seeds give identical instances.
    """
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    base = PRESETS[preset]()
    tag = zlib.crc32(preset.encode())  # stable across processes, unlike hash()
    rng = np.random.default_rng(np.random.SeedSequence([tag, seed]))
    t = base.horizon
    start = int(rng.integers(0, 24))
    hours = [(start + i) % 24 for i in range(t)]
    demand = base.demand * _DAY_LOAD[hours]
    wind = base.wind_forecast * _DAY_WIND[hours]

    def jitter(arr):
        return arr * rng.uniform(0.8, 1.2, size=arr.shape)

    cfg = replace(
        base,
        demand=demand,
        wind_forecast=wind,
        cost_quad=jitter(base.cost_quad),
        cost_lin=jitter(base.cost_lin),
        cost_fix=jitter(base.cost_fix),
        cost_startup=jitter(base.cost_startup),
        cost_shutdown=jitter(base.cost_shutdown),
        cost_reserve=jitter(base.cost_reserve),
    )
    if cfg.p_max.sum() < cfg.peak_load():
        raise RuntimeError("preset violates the capacity >= peak-load guard")
    seeds = np.random.SeedSequence([tag, seed, 7]).generate_state(2)
    spec = SynthSpec(
        k=cfg.xi_dim,
        n=n_scenarios,
        marginal=("normal", 0.0, cfg.error_sigma),
        rho=cfg.error_rho,
        bounds=(-4.0 * cfg.error_sigma, 4.0 * cfg.error_sigma),
        seed=int(seeds[0]),
    )
    train = synth_scenarios(spec)
    holdout = synth_scenarios(replace(spec, n=n_holdout, seed=int(seeds[1])))
    return cfg, ScenarioSet(train.samples, holdout.samples)


@dataclass
class UCModel:
    """A built commitment model plus everything needed to evaluate it."""

    model: ModelIR
    block: ref.ReformulationBlock
    sys: SafetySystem
    xexpr: ref.XExpression
    config: UCConfig
    scen: ScenarioSet
    var_v: np.ndarray      # G x T variable ids
    var_p: np.ndarray
    var_rup: np.ndarray
    var_rdn: np.ndarray
    var_wsch: np.ndarray   # J x T
    var_wcur: np.ndarray
    n_host_vars: int

    def decision_vector(self, incumbent: np.ndarray) -> np.ndarray:
        """Host-variable slice of a solve incumbent (for the joint-row system)."""
        return np.asarray(incumbent[: self.n_host_vars], dtype=float)

    def balance_residual(self, incumbent: np.ndarray) -> float:
        """Largest absolute power-balance violation across periods."""
        p = incumbent[self.var_p]
        w = incumbent[self.var_wsch]
        total = p.sum(axis=0) + w.sum(axis=0)
        return float(np.max(np.abs(total - self.config.demand.sum(axis=0))))

    def min_updown_ok(self, incumbent: np.ndarray, tol: float = 1e-6) -> bool:
        """Scan commitment sequences for minimum up/down violations."""
        v = (incumbent[self.var_v] > 0.5).astype(int)
        cfg = self.config
        for g in range(cfg.n_gens):
            seq = np.concatenate([[0], v[g]])  # cold start
            for t in range(1, len(seq)):
                if seq[t] > seq[t - 1]:  # startup: must stay on
                    span = seq[t : min(t + int(cfg.t_up[g]), len(seq))]
                    if np.any(span == 0):
                        return False
                if seq[t] < seq[t - 1]:  # shutdown: must stay off
                    span = seq[t : min(t + int(cfg.t_dn[g]), len(seq))]
                    if np.any(span == 1):
                        return False
        return True


def _joint_system(cfg: UCConfig, var_p, var_rup, var_rdn, var_wsch, n_host, bounds) -> SafetySystem:
    """Assemble the joint safety rows over the host variable vector."""
    t_len, g_len, j_len, l_len = cfg.horizon, cfg.n_gens, cfg.n_wind, cfg.n_lines
    p_rows = cfg.n_joint_rows
    a = np.zeros((p_rows, n_host))
    b = np.zeros((p_rows, cfg.xi_dim))
    d = np.zeros(p_rows)

    def e_idx(j, t):
        return j * t_len + t

    row = 0
    for t in range(t_len):  # upward reserve adequacy
        for g in range(g_len):
            a[row, var_rup[g, t]] = -1.0
        for j in range(j_len):
            b[row, e_idx(j, t)] = 1.0
        d[row] = -cfg.reserve_extra_up[t]
        row += 1
    for t in range(t_len):  # downward reserve adequacy
        for g in range(g_len):
            a[row, var_rdn[g, t]] = -1.0
        for j in range(j_len):
            b[row, e_idx(j, t)] = -1.0
        d[row] = -cfg.reserve_extra_dn[t]
        row += 1
    net_load = cfg.ptdf_load @ cfg.demand  # L x T
    for t in range(t_len):  # line upper limits
        for line in range(l_len):
            for g in range(g_len):
                a[row, var_p[g, t]] = cfg.ptdf_gen[line, g]
            for j in range(j_len):
                a[row, var_wsch[j, t]] = cfg.ptdf_wind[line, j]
                b[row, e_idx(j, t)] = -cfg.ptdf_wind[line, j]
            d[row] = cfg.line_limit[line] + net_load[line, t]
            row += 1
    for t in range(t_len):  # line lower limits
        for line in range(l_len):
            for g in range(g_len):
                a[row, var_p[g, t]] = -cfg.ptdf_gen[line, g]
            for j in range(j_len):
                a[row, var_wsch[j, t]] = -cfg.ptdf_wind[line, j]
                b[row, e_idx(j, t)] = cfg.ptdf_wind[line, j]
            d[row] = cfg.line_limit[line] - net_load[line, t]
            row += 1
    assert row == p_rows
    return SafetySystem(a=a, b=b, d=d, norm=NormKind.L2, x_bounds=bounds)


def build_uc_model(
    cfg: UCConfig,
    scen: ScenarioSet,
    amb: AmbiguityConfig,
    method: str,
    kappa=1.0,
    w=None,
    eps_alloc=None,
    big_m: float | None = None,
) -> UCModel:
    """Build the commitment model with the chosen joint-constraint encoding."""
    method = ref.Method.parse(method)
    t_len, g_len, j_len = cfg.horizon, cfg.n_gens, cfg.n_wind
    v0 = cfg.v_init if cfg.v_init is not None else np.zeros(g_len)
    p0 = cfg.p_init if cfg.p_init is not None else np.zeros(g_len)
    model = ModelIR(ObjSense.MIN, name=f"uc-{cfg.name}-{method}")

    var_v = np.empty((g_len, t_len), dtype=int)
    var_p = np.empty_like(var_v)
    var_rup = np.empty_like(var_v)
    var_rdn = np.empty_like(var_v)
    var_csu = np.empty_like(var_v)
    var_csd = np.empty_like(var_v)
    for g in range(g_len):
        for t in range(t_len):
            var_v[g, t] = model.add_variable(VarKind.BINARY, 0.0, 1.0, f"v_g{g}_t{t}")
            var_p[g, t] = model.add_variable(VarKind.CONTINUOUS, 0.0, cfg.p_max[g], f"p_g{g}_t{t}")
            var_rup[g, t] = model.add_variable(
                VarKind.CONTINUOUS, 0.0, cfg.r_up_max[g], f"rup_g{g}_t{t}"
            )
            var_rdn[g, t] = model.add_variable(
                VarKind.CONTINUOUS, 0.0, cfg.r_dn_max[g], f"rdn_g{g}_t{t}"
            )
            var_csu[g, t] = model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, f"csu_g{g}_t{t}")
            var_csd[g, t] = model.add_variable(VarKind.CONTINUOUS, 0.0, math.inf, f"csd_g{g}_t{t}")
    var_wsch = np.empty((j_len, t_len), dtype=int)
    var_wcur = np.empty_like(var_wsch)
    for j in range(j_len):
        for t in range(t_len):
            cap = cfg.wind_forecast[j, t]
            var_wsch[j, t] = model.add_variable(VarKind.CONTINUOUS, 0.0, cap, f"wsch_j{j}_t{t}")
            var_wcur[j, t] = model.add_variable(VarKind.CONTINUOUS, 0.0, cap, f"wcur_j{j}_t{t}")
    n_host = model.n_vars

    # objective
    for g in range(g_len):
        for t in range(t_len):
            model.add_objective_coeff(var_csu[g, t], 1.0)
            model.add_objective_coeff(var_csd[g, t], 1.0)
            model.add_objective_coeff(var_p[g, t], cfg.cost_lin[g])
            model.add_objective_coeff(var_v[g, t], cfg.cost_fix[g])
            model.add_objective_coeff(var_rup[g, t], cfg.cost_reserve[g])
            model.add_objective_coeff(var_rdn[g, t], cfg.cost_reserve[g])
            if cfg.cost_quad[g] > 0:
                bp = np.linspace(0.0, cfg.p_max[g], cfg.fuel_segments + 1)
                slopes = cfg.cost_quad[g] * (bp[:-1] + bp[1:])  # secants of a*p^2
                model.add_piecewise(
                    PiecewiseTerm(int(var_p[g, t]), tuple(bp), tuple(slopes), 0.0)
                )
    for j in range(j_len):
        for t in range(t_len):
            model.add_objective_coeff(var_wcur[j, t], cfg.cost_curtail)

    # deterministic rows
    for g in range(g_len):
        csu, csd = cfg.cost_startup[g], cfg.cost_shutdown[g]
        m_ramp = cfg.p_max[g]
        for t in range(t_len):
            prev_v = {var_v[g, t - 1]: 1.0} if t > 0 else None
            # startup / shutdown epigraphs
            coeffs = {var_csu[g, t]: 1.0, var_v[g, t]: -csu}
            rhs = -csu * v0[g] if t == 0 else 0.0
            if t > 0:
                coeffs[var_v[g, t - 1]] = csu
            model.add_row(coeffs, Sense.GE, rhs)
            coeffs = {var_csd[g, t]: 1.0, var_v[g, t]: csd}
            rhs = csd * v0[g] if t == 0 else 0.0
            if t > 0:
                coeffs[var_v[g, t - 1]] = -csd
            model.add_row(coeffs, Sense.GE, rhs)
            # capacity with reserves
            model.add_row(
                {var_p[g, t]: 1.0, var_rup[g, t]: 1.0, var_v[g, t]: -cfg.p_max[g]},
                Sense.LE,
                0.0,
            )
            model.add_row(
                {var_p[g, t]: 1.0, var_rdn[g, t]: -1.0, var_v[g, t]: -cfg.p_min[g]},
                Sense.GE,
                0.0,
            )
            # ramping with commitment big-M (set to the capacity)
            coeffs = {var_p[g, t]: 1.0, var_v[g, t]: m_ramp}
            rhs = cfg.ramp_up[g] + 2.0 * m_ramp
            if t > 0:
                coeffs[var_p[g, t - 1]] = -1.0
                coeffs[var_v[g, t - 1]] = m_ramp
            else:
                rhs += p0[g] - m_ramp * v0[g]
            model.add_row(coeffs, Sense.LE, rhs)
            coeffs = {var_p[g, t]: -1.0, var_v[g, t]: m_ramp}
            rhs = cfg.ramp_dn[g] + 2.0 * m_ramp
            if t > 0:
                coeffs[var_p[g, t - 1]] = 1.0
                coeffs[var_v[g, t - 1]] = m_ramp
            else:
                rhs -= p0[g] + m_ramp * v0[g]
            model.add_row(coeffs, Sense.LE, rhs)
        # minimum up/down times
        t_up, t_dn = int(cfg.t_up[g]), int(cfg.t_dn[g])
        for t in range(t_len):
            if t <= t_len - t_up:
                coeffs = {var_v[g, tau]: 1.0 for tau in range(t, t + t_up)}
                coeffs[var_v[g, t]] = coeffs.get(var_v[g, t], 0.0) - t_up
                rhs = 0.0
                if t > 0:
                    coeffs[var_v[g, t - 1]] = coeffs.get(var_v[g, t - 1], 0.0) + t_up
                else:
                    rhs = -t_up * v0[g]
                model.add_row(coeffs, Sense.GE, rhs)
            else:
                span = t_len - t
                coeffs = {var_v[g, tau]: 1.0 for tau in range(t, t_len)}
                coeffs[var_v[g, t]] = coeffs.get(var_v[g, t], 0.0) - span
                rhs = 0.0
                if t > 0:
                    coeffs[var_v[g, t - 1]] = coeffs.get(var_v[g, t - 1], 0.0) + span
                else:
                    rhs = -span * v0[g]
                model.add_row(coeffs, Sense.GE, rhs)
            if t <= t_len - t_dn:
                coeffs = {var_v[g, tau]: -1.0 for tau in range(t, t + t_dn)}
                coeffs[var_v[g, t]] = coeffs.get(var_v[g, t], 0.0) + t_dn
                rhs = -t_dn
                if t > 0:
                    coeffs[var_v[g, t - 1]] = coeffs.get(var_v[g, t - 1], 0.0) - t_dn
                else:
                    rhs += t_dn * v0[g]
                model.add_row(coeffs, Sense.GE, rhs)
            else:
                span = t_len - t
                coeffs = {var_v[g, tau]: -1.0 for tau in range(t, t_len)}
                coeffs[var_v[g, t]] = coeffs.get(var_v[g, t], 0.0) + span
                rhs = -span
                if t > 0:
                    coeffs[var_v[g, t - 1]] = coeffs.get(var_v[g, t - 1], 0.0) - span
                else:
                    rhs += span * v0[g]
                model.add_row(coeffs, Sense.GE, rhs)
    for t in range(t_len):  # power balance
        coeffs = {int(var_p[g, t]): 1.0 for g in range(g_len)}
        for j in range(j_len):
            coeffs[int(var_wsch[j, t])] = 1.0
        model.add_row(coeffs, Sense.EQ, float(cfg.demand[:, t].sum()), f"balance_t{t}")
    for j in range(j_len):  # wind scheduling
        for t in range(t_len):
            model.add_row(
                {var_wsch[j, t]: 1.0, var_wcur[j, t]: 1.0},
                Sense.EQ,
                float(cfg.wind_forecast[j, t]),
            )

    bounds = np.array([[v.lb, v.ub] for v in model.variables])
    sys = _joint_system(cfg, var_p, var_rup, var_rdn, var_wsch, n_host, bounds)
    xexpr = ref.XExpression.from_system(sys, list(range(n_host)))
    block = ref.build_block(
        model, method, xexpr, scen, sys, amb,
        kappa=kappa, w=w, eps_alloc=eps_alloc, big_m=big_m,
    )
    return UCModel(
        model=model,
        block=block,
        sys=sys,
        xexpr=xexpr,
        config=cfg,
        scen=scen,
        var_v=var_v,
        var_p=var_p,
        var_rup=var_rup,
        var_rdn=var_rdn,
        var_wsch=var_wsch,
        var_wcur=var_wcur,
        n_host_vars=n_host,
    )


@dataclass
class UCBuildReport:
    run_id: str
    preset: str
    seed: int
    method: str
    epsilon: float
    theta: float
    n_scenarios: int
    status: str
    objective: float | None
    time_s: float
    timef_s: float | None
    reliability: float | None
    obj_diff_vs_sfla: float | None = None

    def csv_row(self) -> list:
        def fmt(v):
            return "" if v is None else (f"{v:.6f}" if isinstance(v, float) else v)

        return [
            self.run_id, self.preset, self.seed, self.method,
            self.epsilon, self.theta, self.n_scenarios, self.status,
            fmt(self.objective), f"{self.time_s:.4f}", fmt(self.timef_s),
            fmt(self.reliability), fmt(self.obj_diff_vs_sfla),
        ]


BENCH_COLUMNS = [
    "run_id", "preset", "seed", "method", "epsilon", "theta", "N",
    "status", "objective", "time_s", "timef_s", "reliability",
    "obj_diff_vs_sfla",
]


def run_benchmark(
    presets: list[str],
    seeds: list[int],
    methods: list[str],
    amb_grid: list[tuple[float, float]] | None = None,
    n_scenarios: int = 20,
    n_holdout: int = 2000,
    options: SolveOptions | None = None,
    out_csv: str | None = None,
    kappa=1.0,
) -> list[UCBuildReport]:
    """Sweep (preset, seed, ambiguity, method) and collect one report per run.

    Per-run failures are recorded as ``error`` rows and never abort the
    sweep.  Objective differences are taken against the strengthened linear
    approximation of the same (preset, seed, ambiguity) group, positive when
    the other method achieved the lower cost.  The scipy backend exposes no
    incumbent timestamps, so the time-to-first-comparable column stays empty.
    """
    amb_grid = amb_grid or [(0.05, 0.1)]
    opts = options or SolveOptions(time_limit_s=120.0)
    reports: list[UCBuildReport] = []
    run = 0
    for preset in presets:
        for seed in seeds:
            cfg, scen = generate_uc_instance(preset, seed, n_scenarios, n_holdout)
            for eps, theta in amb_grid:
                amb = AmbiguityConfig(eps, theta)
                group: list[UCBuildReport] = []
                for method in methods:
                    run += 1
                    run_id = f"r{run:04d}"
                    t0 = time.perf_counter()
                    try:
                        ucm = build_uc_model(cfg, scen, amb, method, kappa=kappa)
                        res = solve(ucm.model, opts)
                        elapsed = time.perf_counter() - t0
                        rel = None
                        obj = None
                        if res.ok:
                            obj = res.objective
                            x_host = ucm.decision_vector(res.x)
                            rel = oracle_reliability(x_host, scen.holdout, ucm.sys)
                        group.append(
                            UCBuildReport(
                                run_id, preset, seed, ref.Method.parse(method),
                                eps, theta, scen.n, res.status.value, obj,
                                elapsed, res.time_to_first_comparable_s, rel,
                            )
                        )
                    except Exception as exc:  # recorded, sweep continues
                        elapsed = time.perf_counter() - t0
                        group.append(
                            UCBuildReport(
                                run_id, preset, seed, method, eps, theta,
                                n_scenarios, f"error: {exc}", None, elapsed,
                                None, None,
                            )
                        )
                sfla_obj = next(
                    (g.objective for g in group if g.method == "sfla" and g.objective is not None),
                    None,
                )
                if sfla_obj is not None and sfla_obj != 0.0:
                    for g in group:
                        if g.objective is not None:
                            g.obj_diff_vs_sfla = 100.0 * (sfla_obj - g.objective) / abs(sfla_obj)
                reports.extend(group)
    if out_csv:
        write_csv_table(out_csv, BENCH_COLUMNS, [r.csv_row() for r in reports])
    return reports
