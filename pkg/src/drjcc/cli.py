"""Command-line front end.

Subcommands: ``solve`` (build one model with the chosen reformulation and
optimize), ``oracle`` (membership table for a file of decision points),
``compare`` (sampled feasible-region comparison with figure), ``bench``
(unit-commitment benchmark sweep writing CSV plus figure), ``gen``
(synthetic scenario/instance files).

Every run is driven by a JSON config document; randomized commands require
an explicit seed.  Only the backend name and the time limit may be
overridden from the environment (``DRJCC_BACKEND``, ``DRJCC_TIME_LIMIT``).

Exit codes: 0 success, 1 usage/config error, 2 infeasible, 3 comparison
found an inclusion counterexample.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import reformulations as ref
from . import uc as uc_mod
from .backends import DEFAULT_BACKEND, SolveOptions, SolveStatus, available_backends, solve
from .core import AmbiguityConfig, NormKind, SafetySystem, ScenarioSet
from .data_io import SynthSpec, load_scenarios, save_scenarios, synth_scenarios, write_csv_table
from .model import ModelIR, ObjSense, VarKind, emit_lp_text, emit_mps_text
from .oracle import (
    compare_regions,
    exact_feasible,
    in_sample_violations,
    membership_margin,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_COUNTEREXAMPLE = 3

ORACLE_COLUMNS = [
    "x", "exact_oracle", "exact_mip", "exacts", "la", "sfla", "wcvar",
    "bonferroni", "s_star", "violations",
]


class ConfigError(ValueError):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return doc[key]


def load_problem(path: str) -> tuple[SafetySystem, np.ndarray | None]:
    """Problem document: safety rows, x box, optional objective coefficients."""
    doc = _load_json(path)
    rows = _require(doc, "rows", path)
    if not rows:
        raise ConfigError(f"{path}: empty rows")
    a = np.array([r["a"] for r in rows], dtype=float)
    b = np.array([r["b"] for r in rows], dtype=float)
    d = np.array([r.get("d", 0.0) for r in rows], dtype=float)
    norm = NormKind.parse(doc.get("norm", "l2"))
    bounds = np.array(_require(doc, "x_bounds", path), dtype=float)
    objective = doc.get("objective")
    if objective is not None:
        objective = np.asarray(objective, dtype=float)
    try:
        return SafetySystem(a=a, b=b, d=d, norm=norm, x_bounds=bounds), objective
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


class RunConfig:
    """Validated view over one run's JSON config document."""

    def __init__(self, doc: dict, where: str = "config"):
        self.where = where
        base = Path(where).parent if where != "config" else Path(".")

        def respath(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        self.problem_path = respath(_require(doc, "problem", where))
        self.scenarios_path = respath(_require(doc, "scenarios", where))
        self.method = ref.Method.parse(doc.get("method", "sfla"))
        self.epsilon = float(_require(doc, "epsilon", where))
        self.theta = float(_require(doc, "theta", where))
        self.kappa = doc.get("kappa", 1.0)
        self.w_policy = doc.get("w_policy", "uniform")
        if self.w_policy not in ("uniform", "analytic-wstar", "explicit"):
            raise ConfigError(f"{where}: unknown w_policy {self.w_policy!r}")
        self.w = doc.get("w")
        if self.w_policy == "explicit" and self.w is None:
            raise ConfigError(f"{where}: w_policy=explicit requires 'w'")
        self.eps_alloc = doc.get("eps_alloc")
        self.objective = doc.get("objective")
        solver = doc.get("solver", {})
        try:
            self.options = SolveOptions(
                time_limit_s=float(solver.get("time_limit_s", 3600.0)),
                mip_gap=float(solver.get("mip_gap", 1e-3)),
                feasibility_tol=float(solver.get("feasibility_tol", 1e-9)),
                integer_tol=float(solver.get("integer_tol", 1e-9)),
                seed=int(solver.get("seed", 0)),
                threads=int(solver.get("threads", 4)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: bad solver options: {exc}") from exc
        self.backend = doc.get("backend", DEFAULT_BACKEND)
        # environment overrides: backend name and time limit only
        env_backend = os.environ.get("DRJCC_BACKEND")
        if env_backend:
            self.backend = env_backend
        env_limit = os.environ.get("DRJCC_TIME_LIMIT")
        if env_limit:
            self.options = replace(self.options, time_limit_s=float(env_limit))

    def load(self) -> tuple[SafetySystem, ScenarioSet, AmbiguityConfig]:
        sys_, problem_obj = load_problem(str(self.problem_path))
        if self.objective is None:
            self.objective = problem_obj
        scen = load_scenarios(self.scenarios_path)
        if scen.dim != sys_.xi_dim:
            raise ConfigError(
                f"{self.where}: scenario dimension {scen.dim} != uncertainty dimension {sys_.xi_dim}"
            )
        try:
            amb = AmbiguityConfig(self.epsilon, self.theta)
        except ValueError as exc:
            raise ConfigError(f"{self.where}: {exc}") from exc
        return sys_, scen, amb

    def weights(self, sys_: SafetySystem):
        if self.method != "wcvar":
            return None
        if self.w_policy == "uniform":
            return None
        if self.w_policy == "analytic-wstar":
            return ref.analytic_wstar(sys_)
        return np.asarray(self.w, dtype=float)


def cmd_solve(args) -> int:
    cfg = RunConfig(_load_json(args.config), args.config)
    _apply_flag_overrides(cfg, args)
    sys_, scen, amb = cfg.load()
    model = ModelIR(ObjSense.MIN, name="run")
    xids = [
        model.add_variable(VarKind.CONTINUOUS, sys_.x_bounds[j, 0], sys_.x_bounds[j, 1], f"x{j}")
        for j in range(sys_.x_dim)
    ]
    if cfg.objective is not None:
        obj = np.asarray(cfg.objective, dtype=float)
        if obj.shape != (sys_.x_dim,):
            raise ConfigError(f"{cfg.where}: objective length must be {sys_.x_dim}")
        for j, c in enumerate(obj):
            if c:
                model.set_objective_coeff(xids[j], float(c))
    xexpr = ref.XExpression.from_system(sys_, xids)
    block = ref.build_block(
        model, cfg.method, xexpr, scen, sys_, amb,
        kappa=cfg.kappa, w=cfg.weights(sys_), eps_alloc=cfg.eps_alloc,
    )
    res = solve(model, cfg.options, backend=cfg.backend)
    report = {
        "method": cfg.method,
        "status": res.status.value,
        "objective": res.objective,
        "x": None if res.x is None else [float(v) for v in res.x[: sys_.x_dim]],
        "wall_time_s": res.wall_time_s,
        "gap": res.gap,
        "rows_added": block.n_rows_added,
        "vars_added": block.n_vars_added,
    }
    out = Path(args.out or "solve_report.json")
    out.write_text(json.dumps(report, indent=2))
    print(f"{cfg.method}: {res.status.value}"
          + (f", objective {res.objective:.6f}" if res.objective is not None else ""))
    print(f"report written to {out}")
    if args.emit_lp:
        Path(args.emit_lp).write_text(emit_lp_text(model))
    if args.emit_mps:
        Path(args.emit_mps).write_text(emit_mps_text(model))
    if res.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE_TIME_LIMIT):
        return EXIT_OK
    if res.status is SolveStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    return EXIT_ERROR


def _read_x_rows(path: str, dim: int) -> np.ndarray:
    """Decision points, one CSV row each; empty file yields an empty table."""
    text = Path(path).read_text().strip()
    if not text:
        return np.zeros((0, dim))
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = [c for c in line.replace(",", " ").split() if c]
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise ConfigError(f"{path}: non-numeric value in row {lineno}") from None
        if len(vals) != dim:
            raise ConfigError(f"{path}: row {lineno} has {len(vals)} values, expected {dim}")
        if not all(np.isfinite(vals)):
            raise ConfigError(f"{path}: non-finite value in row {lineno}")
        rows.append(vals)
    return np.asarray(rows, dtype=float)


def cmd_oracle(args) -> int:
    cfg = RunConfig(_load_json(args.config), args.config)
    _apply_flag_overrides(cfg, args)
    sys_, scen, amb = cfg.load()
    xs = _read_x_rows(args.x_values, sys_.x_dim)
    rows = []
    for x in xs:
        feas, s_star = exact_feasible(x, scen, sys_, amb)
        verdicts = {"exact_oracle": feas}
        for method, kw in (
            ("exact-mip", {}),
            ("exacts", {}),
            ("la", {"kappa": cfg.kappa}),
            ("sfla", {"kappa": cfg.kappa}),
            ("wcvar", {"w": cfg.weights(sys_) if cfg.w_policy != "uniform" else None}),
            ("bonferroni", {"eps_alloc": cfg.eps_alloc}),
        ):
            member, _ = membership_margin(x, method, scen, sys_, amb, backend=cfg.backend, **kw)
            verdicts[method.replace("-", "_")] = member
        rows.append(
            [
                " ".join(format(v, ".10g") for v in x),
                *(str(verdicts[c]).lower() for c in ORACLE_COLUMNS[1:8]),
                f"{s_star:.10g}",
                in_sample_violations(x, scen, sys_),
            ]
        )
    out = Path(args.out or "oracle_table.csv")
    write_csv_table(out, ORACLE_COLUMNS, rows)
    print(f"{len(rows)} decision points evaluated; table written to {out}")
    for r in rows:
        print("  x=[" + r[0] + "] exact=" + r[1] + " sfla=" + r[5])
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = RunConfig(_load_json(args.config), args.config)
    _apply_flag_overrides(cfg, args)
    sys_, scen, amb = cfg.load()
    comp = compare_regions(
        scen, sys_, amb,
        n_samples=args.samples,
        kappa=cfg.kappa,
        w=cfg.weights(sys_),
        seed=args.seed,
    )
    if args.self_test_tamper:
        comp.counterexamples.append(
            {"x": [], "pair": ["tampered", "tampered"], "margins": {}}
        )
    out = Path(args.out or "compare_report.json")
    out.write_text(comp.to_json(indent=2))
    print(f"comparison over {comp.n_samples} samples: "
          + ("PASS" if comp.passed else f"FAIL ({len(comp.counterexamples)} counterexamples)"))
    for m, c in comp.acceptance.items():
        print(f"  {m:>14}: {c} accepted")
    if comp.borderline:
        print(f"  {comp.borderline} borderline points excluded")
    if not args.no_plot:
        from .plots import plot_region_comparison

        fig = out.with_suffix(".png")
        plot_region_comparison(comp, fig)
        print(f"figure written to {fig}")
    print(f"report written to {out}")
    return EXIT_OK if comp.passed else EXIT_COUNTEREXAMPLE


def cmd_bench(args) -> int:
    methods = [ref.Method.parse(m) for m in args.methods.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    opts = SolveOptions(time_limit_s=args.time_limit)
    env_limit = os.environ.get("DRJCC_TIME_LIMIT")
    if env_limit:
        opts = replace(opts, time_limit_s=float(env_limit))
    reports = uc_mod.run_benchmark(
        presets=[args.preset],
        seeds=seeds,
        methods=methods,
        amb_grid=[(args.epsilon, args.theta)],
        n_scenarios=args.n_scenarios,
        options=opts,
        out_csv=args.out,
    )
    print(f"{len(reports)} runs written to {args.out}")
    for r in reports:
        obj = "" if r.objective is None else f" obj={r.objective:.2f}"
        print(f"  {r.run_id} {r.method:>10} seed={r.seed} {r.status}{obj} t={r.time_s:.2f}s")
    if not args.no_plot:
        from .plots import plot_benchmark

        fig = Path(args.out).with_suffix(".png")
        plot_benchmark(reports, fig)
        print(f"figure written to {fig}")
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "synth":
        spec = SynthSpec(
            k=args.k,
            n=args.n,
            marginal=("normal", args.mu, args.sigma),
            rho=args.rho,
            seed=args.seed,
        )
        scen = synth_scenarios(spec)
        save_scenarios(scen, args.out)
        print(f"{scen.n} x {scen.dim} scenario matrix written to {args.out}")
        return EXIT_OK
    # unit-commitment instance
    cfg, scen = uc_mod.generate_uc_instance(args.preset, args.seed, n_scenarios=args.n)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    inst = {
        k: (v.tolist() if isinstance(v, np.ndarray) else v)
        for k, v in asdict(cfg).items()
    }
    (outdir / "instance.json").write_text(json.dumps(inst, indent=2))
    save_scenarios(scen, outdir / "scenarios.csv")
    save_scenarios(ScenarioSet(scen.holdout), outdir / "holdout.csv")
    print(f"instance + scenarios written to {outdir}")
    return EXIT_OK


def _apply_flag_overrides(cfg: RunConfig, args) -> None:
    if getattr(args, "method", None):
        cfg.method = ref.Method.parse(args.method)
    if getattr(args, "epsilon", None) is not None:
        cfg.epsilon = args.epsilon
    if getattr(args, "theta", None) is not None:
        cfg.theta = args.theta
    if getattr(args, "norm", None):
        NormKind.parse(args.norm)  # validated; the problem file owns the norm
    if getattr(args, "kappa", None) is not None:
        cfg.kappa = args.kappa
    if getattr(args, "w_policy", None):
        cfg.w_policy = args.w_policy
    if getattr(args, "backend", None):
        cfg.backend = args.backend
    if getattr(args, "time_limit", None) is not None:
        cfg.options = replace(cfg.options, time_limit_s=args.time_limit)
    if getattr(args, "solver_seed", None) is not None:
        cfg.options = replace(cfg.options, seed=args.solver_seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drjcc",
        description="Robust joint chance constraint toolkit: build, solve, and cross-validate reformulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_method=True):
        p.add_argument("--config", required=True, help="JSON run config")
        if with_method:
            p.add_argument("--method", choices=ref.METHODS, help="override config method")
        p.add_argument("--epsilon", type=float, help="override risk level")
        p.add_argument("--theta", type=float, help="override radius")
        p.add_argument("--norm", help="validate norm name (l1, l2, linf)")
        p.add_argument("--kappa", type=float, help="uniform kappa override")
        p.add_argument("--w-policy", dest="w_policy",
                       choices=["uniform", "analytic-wstar", "explicit"])
        p.add_argument("--backend", choices=available_backends())
        p.add_argument("--time-limit", dest="time_limit", type=float)
        p.add_argument("--out", help="output path")

    p_solve = sub.add_parser("solve", help="build one model and optimize it")
    add_common(p_solve)
    p_solve.add_argument("--seed", dest="solver_seed", type=int,
                         help="solver seed (backend may ignore it)")
    p_solve.add_argument("--emit-lp", help="also write the model as LP text")
    p_solve.add_argument("--emit-mps", help="also write the model as MPS text")
    p_solve.set_defaults(func=cmd_solve)

    p_oracle = sub.add_parser("oracle", help="membership table for decision points")
    add_common(p_oracle, with_method=False)
    p_oracle.add_argument("--x-values", required=True, help="CSV of decision rows")
    p_oracle.set_defaults(func=cmd_oracle)

    p_cmp = sub.add_parser("compare", help="sampled feasible-region comparison")
    add_common(p_cmp, with_method=False)
    p_cmp.add_argument("--samples", type=int, default=200)
    p_cmp.add_argument("--seed", type=int, required=True)
    p_cmp.add_argument("--no-plot", action="store_true")
    p_cmp.add_argument("--self-test-tamper", action="store_true", help=argparse.SUPPRESS)
    p_cmp.set_defaults(func=cmd_compare)

    p_bench = sub.add_parser("bench", help="unit-commitment benchmark sweep")
    p_bench.add_argument("--preset", choices=sorted(uc_mod.PRESETS), default="tiny")
    p_bench.add_argument("--seeds", default="1,2,3,4,5,6,7,8,9,10",
                         help="comma-separated seeds")
    p_bench.add_argument("--methods", default="sfla,exacts",
                         help="comma-separated method names")
    p_bench.add_argument("--epsilon", type=float, default=0.05)
    p_bench.add_argument("--theta", type=float, default=0.1)
    p_bench.add_argument("--n-scenarios", type=int, default=20)
    p_bench.add_argument("--time-limit", dest="time_limit", type=float, default=120.0)
    p_bench.add_argument("--no-plot", action="store_true")
    p_bench.add_argument("--out", default="bench_report.csv")
    p_bench.set_defaults(func=cmd_bench)

    p_gen = sub.add_parser("gen", help="generate scenario or instance files")
    gen_sub = p_gen.add_subparsers(dest="kind", required=True)
    g_synth = gen_sub.add_parser("synth", help="synthetic correlated scenarios")
    g_synth.add_argument("--k", type=int, required=True)
    g_synth.add_argument("--n", type=int, required=True)
    g_synth.add_argument("--mu", type=float, default=0.0)
    g_synth.add_argument("--sigma", type=float, default=1.0)
    g_synth.add_argument("--rho", type=float, default=0.0)
    g_synth.add_argument("--seed", type=int, required=True)
    g_synth.add_argument("--out", required=True)
    g_synth.set_defaults(func=cmd_gen, kind="synth")
    g_uc = gen_sub.add_parser("uc", help="unit-commitment instance files")
    g_uc.add_argument("--preset", choices=sorted(uc_mod.PRESETS), default="tiny")
    g_uc.add_argument("--seed", type=int, required=True)
    g_uc.add_argument("--n", type=int, default=20, help="training scenario count")
    g_uc.add_argument("--out", required=True, help="output directory")
    g_uc.set_defaults(func=cmd_gen, kind="uc")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
