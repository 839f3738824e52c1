"""Toolkit for Wasserstein-robust joint chance constraints with RHS uncertainty.

Build any of six interchangeable reformulations into a host optimization
model, decide exact feasibility of a decision without a solver, compare the
feasible regions against each other, and benchmark the methods on a
desk-scale unit-commitment problem.
"""

from .backends import SolveOptions, SolveResult, SolveStatus, available_backends, solve
from .core import (
    AmbiguityConfig,
    NormKind,
    OrderData,
    SafetySystem,
    ScenarioSet,
    distance,
    distance_hat,
    distance_profile,
    dual_norm,
    order_data,
)
from .data_io import SynthSpec, load_scenarios, save_scenarios, synth_scenarios
from .model import LinRow, ModelIR, ObjSense, PiecewiseTerm, Sense, VarKind, emit_lp_text, emit_mps_text
from .oracle import (
    MembershipReport,
    RegionComparison,
    compare_regions,
    exact_feasible,
    in_sample_violations,
    membership,
    membership_margin,
    reliability,
)
from .reformulations import (
    METHODS,
    BonferroniVaR,
    ReformulationBlock,
    UnboundedVaRError,
    XExpression,
    analytic_wstar,
    bonferroni_var,
    build_block,
    build_bonferroni,
    build_exact_mip,
    build_exacts,
    build_la,
    build_sfla,
    build_wcvar,
    compute_big_m,
)

__version__ = "0.1.0"
