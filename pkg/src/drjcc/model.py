"""Solver-agnostic linear/mixed-integer model representation and text emission.

A :class:`ModelIR` is a plain container of variable declarations, sparse
linear rows, and a linear objective that may carry convex piecewise-linear
terms (used to linearize quadratic costs without a QP backend).  Emission to
LP or fixed-format MPS text is deterministic down to the byte: coefficients
are printed with 17 significant digits and iteration order is the insertion
order, so identical models always produce identical files.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "VarKind",
    "Sense",
    "ObjSense",
    "VarDecl",
    "LinRow",
    "PiecewiseTerm",
    "ModelIR",
    "expand_piecewise",
    "emit_lp_text",
    "emit_mps_text",
    "max_violation",
]


class VarKind(Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


class Sense(Enum):
    """Constraint sense."""

    LE = "<="
    GE = ">="
    EQ = "="


class ObjSense(Enum):
    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class VarDecl:
    vid: int
    kind: VarKind
    lb: float
    ub: float
    name: str = ""


@dataclass(frozen=True)
class LinRow:
    """Sparse row: sum(coeffs[j] * x_j)  (sense)  rhs."""

    coeffs: dict[int, float]
    sense: Sense
    rhs: float
    name: str = ""


@dataclass(frozen=True)
class PiecewiseTerm:
    """Convex piecewise-linear objective term on a single variable.

    The function starts at value ``f0`` at ``breakpoints[0]`` and follows
    ``slopes[j]`` on segment j.  Slopes must be nondecreasing so the epigraph
    expansion is exact for a minimization objective.
    """

    vid: int
    breakpoints: tuple[float, ...]
    slopes: tuple[float, ...]
    f0: float = 0.0

    def __post_init__(self):
        if len(self.breakpoints) != len(self.slopes) + 1:
            raise ValueError("need one more breakpoint than slopes")
        if len(self.slopes) < 1:
            raise ValueError("need at least one segment")
        bp = self.breakpoints
        if any(bp[j] >= bp[j + 1] for j in range(len(bp) - 1)):
            raise ValueError("breakpoints must be strictly increasing")
        sl = self.slopes
        if any(sl[j] > sl[j + 1] + 1e-12 for j in range(len(sl) - 1)):
            raise ValueError("slopes must be nondecreasing (convex term)")

    def pieces(self) -> list[tuple[float, float]]:
        """(slope, intercept) of every affine piece of the epigraph."""
        out = []
        val = self.f0
        for j, slope in enumerate(self.slopes):
            x0 = self.breakpoints[j]
            out.append((slope, val - slope * x0))
            val += slope * (self.breakpoints[j + 1] - x0)
        return out


class ModelIR:
    """Mutable while being assembled; treat as frozen once handed to a solver."""

    def __init__(self, obj_sense: ObjSense = ObjSense.MIN, name: str = "model"):
        self.name = name
        self.obj_sense = obj_sense
        self.variables: list[VarDecl] = []
        self.constraints: list[LinRow] = []
        self.obj_coeffs: dict[int, float] = {}
        self.obj_offset: float = 0.0
        self.piecewise: list[PiecewiseTerm] = []

    # -- construction ------------------------------------------------------

    def add_variable(
        self,
        kind: VarKind = VarKind.CONTINUOUS,
        lb: float = 0.0,
        ub: float = math.inf,
        name: str = "",
    ) -> int:
        """Declare a variable and return its fresh id."""
        if math.isnan(lb) or math.isnan(ub):
            raise ValueError("NaN bound")
        if lb > ub:
            raise ValueError(f"inverted bounds [{lb}, {ub}]")
        if kind is VarKind.BINARY and (lb < 0.0 or ub > 1.0):
            raise ValueError("binary bounds must lie within [0, 1]")
        vid = len(self.variables)
        self.variables.append(VarDecl(vid, kind, float(lb), float(ub), name))
        return vid

    def add_constraint(self, row: LinRow) -> int:
        """Append a row; zero coefficients are dropped, unknown ids rejected."""
        nvars = len(self.variables)
        coeffs = {}
        for vid, c in row.coeffs.items():
            if not (0 <= vid < nvars):
                raise ValueError(f"constraint references undeclared variable id {vid}")
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient on variable {vid}")
            if c != 0.0:
                coeffs[int(vid)] = float(c)
        if math.isnan(row.rhs):
            raise ValueError("NaN right-hand side")
        cid = len(self.constraints)
        self.constraints.append(LinRow(coeffs, row.sense, float(row.rhs), row.name))
        return cid

    def add_row(self, coeffs: dict[int, float], sense: Sense, rhs: float, name: str = "") -> int:
        return self.add_constraint(LinRow(coeffs, sense, rhs, name))

    def set_objective_coeff(self, vid: int, coeff: float) -> None:
        if not (0 <= vid < len(self.variables)):
            raise ValueError(f"objective references undeclared variable id {vid}")
        if coeff == 0.0:
            self.obj_coeffs.pop(vid, None)
        else:
            self.obj_coeffs[vid] = float(coeff)

    def add_objective_coeff(self, vid: int, coeff: float) -> None:
        self.set_objective_coeff(vid, self.obj_coeffs.get(vid, 0.0) + coeff)

    def add_piecewise(self, term: PiecewiseTerm) -> None:
        if not (0 <= term.vid < len(self.variables)):
            raise ValueError("piecewise term references undeclared variable")
        if self.obj_sense is not ObjSense.MIN:
            raise ValueError("piecewise objective terms require a minimization sense")
        self.piecewise.append(term)

    # -- queries -----------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.constraints)

    @property
    def n_binary(self) -> int:
        return sum(1 for v in self.variables if v.kind is VarKind.BINARY)

    def objective_value(self, x: np.ndarray) -> float:
        val = self.obj_offset + sum(c * x[v] for v, c in self.obj_coeffs.items())
        for term in self.piecewise:
            val += max(s * x[term.vid] + b for s, b in term.pieces())
        return float(val)


def expand_piecewise(model: ModelIR) -> ModelIR:
    """Return an equivalent model with every piecewise term expanded.

    Each term gets one epigraph variable with unit objective coefficient and
    one row per affine piece; models without terms are returned as-is.
    """
    if not model.piecewise:
        return model
    out = ModelIR(model.obj_sense, model.name)
    out.variables = list(model.variables)
    out.constraints = list(model.constraints)
    out.obj_coeffs = dict(model.obj_coeffs)
    out.obj_offset = model.obj_offset
    for term in model.piecewise:
        epi = out.add_variable(VarKind.CONTINUOUS, -math.inf, math.inf, f"pwl{term.vid}")
        out.add_objective_coeff(epi, 1.0)
        for slope, intercept in term.pieces():
            # epi >= slope * x + intercept
            out.add_row({epi: 1.0, term.vid: -slope}, Sense.GE, intercept)
    return out


# -- text emission -----------------------------------------------------------

_NAME_OK = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _fmt(v: float) -> str:
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return format(v, ".17g")


def _identifier_map(model: ModelIR) -> list[str]:
    """Deterministic LP/MPS-safe variable names; fall back to x<id>."""
    names = []
    seen: set[str] = set()
    for v in model.variables:
        cand = v.name if v.name and _NAME_OK.match(v.name) else f"x{v.vid}"
        if cand in seen:
            cand = f"x{v.vid}"
        seen.add(cand)
        names.append(cand)
    return names


def _lp_expr(coeffs: dict[int, float], names: list[str]) -> str:
    parts = []
    for vid in sorted(coeffs):
        c = coeffs[vid]
        sign = "-" if c < 0 else "+"
        if not parts and sign == "+":
            parts.append(f"{_fmt(abs(c))} {names[vid]}")
        else:
            parts.append(f"{sign} {_fmt(abs(c))} {names[vid]}")
    return " ".join(parts) if parts else "0 " + (names[0] if names else "x0")


def emit_lp_text(model: ModelIR) -> str:
    """Industry-standard LP file text; byte-stable for identical models."""
    m = expand_piecewise(model)
    names = _identifier_map(m)
    lines = []
    lines.append("\\ " + m.name)
    lines.append("Minimize" if m.obj_sense is ObjSense.MIN else "Maximize")
    lines.append(" obj: " + _lp_expr(m.obj_coeffs, names))
    lines.append("Subject To")
    for i, row in enumerate(m.constraints):
        op = {Sense.LE: "<=", Sense.GE: ">=", Sense.EQ: "="}[row.sense]
        lines.append(f" c{i}: " + _lp_expr(row.coeffs, names) + f" {op} {_fmt(row.rhs)}")
    lines.append("Bounds")
    for v in m.variables:
        nm = names[v.vid]
        if v.lb == -math.inf and v.ub == math.inf:
            lines.append(f" {nm} free")
        elif v.lb == v.ub:
            lines.append(f" {nm} = {_fmt(v.lb)}")
        else:
            lines.append(f" {_fmt(v.lb)} <= {nm} <= {_fmt(v.ub)}")
    binaries = [names[v.vid] for v in m.variables if v.kind is VarKind.BINARY]
    if binaries:
        lines.append("Binaries")
        for nm in binaries:
            lines.append(f" {nm}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _mps_field(text: str, width: int) -> str:
    return text[:width].ljust(width)


def emit_mps_text(model: ModelIR) -> str:
    """Fixed-format MPS text with integer markers for binaries."""
    m = expand_piecewise(model)
    names = _identifier_map(m)
    lines = [f"NAME          {m.name}"]
    lines.append("ROWS")
    lines.append(" N  COST")
    sense_tag = {Sense.LE: "L", Sense.GE: "G", Sense.EQ: "E"}
    for i, row in enumerate(m.constraints):
        lines.append(f" {sense_tag[row.sense]}  c{i}")
    # column-major coefficient table
    by_var: dict[int, list[tuple[str, float]]] = {v.vid: [] for v in m.variables}
    for vid, c in m.obj_coeffs.items():
        by_var[vid].append(("COST", c))
    for i, row in enumerate(m.constraints):
        for vid, c in row.coeffs.items():
            by_var[vid].append((f"c{i}", c))
    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for v in m.variables:
        is_int = v.kind is VarKind.BINARY
        if is_int and not in_int:
            lines.append(f"    MARKER{marker:04d}  'MARKER'                 'INTORG'")
            marker += 1
            in_int = True
        elif not is_int and in_int:
            lines.append(f"    MARKER{marker:04d}  'MARKER'                 'INTEND'")
            marker += 1
            in_int = False
        entries = by_var[v.vid]
        if not entries:
            entries = [("COST", 0.0)]
        for rname, c in entries:
            lines.append(
                "    "
                + _mps_field(names[v.vid], 10)
                + _mps_field(rname, 10)
                + _fmt(c)
            )
    if in_int:
        lines.append(f"    MARKER{marker:04d}  'MARKER'                 'INTEND'")
    lines.append("RHS")
    for i, row in enumerate(m.constraints):
        if row.rhs != 0.0:
            lines.append("    " + _mps_field("RHS", 10) + _mps_field(f"c{i}", 10) + _fmt(row.rhs))
    lines.append("BOUNDS")
    for v in m.variables:
        nm = names[v.vid]
        if v.kind is VarKind.BINARY and v.lb == 0.0 and v.ub == 1.0:
            lines.append(" BV " + _mps_field("BND", 10) + _mps_field(nm, 10))
            continue
        if v.lb == v.ub:
            lines.append(" FX " + _mps_field("BND", 10) + _mps_field(nm, 10) + _fmt(v.lb))
            continue
        if v.lb == -math.inf and v.ub == math.inf:
            lines.append(" FR " + _mps_field("BND", 10) + _mps_field(nm, 10))
            continue
        if v.lb != 0.0:
            tag = " MI " if v.lb == -math.inf else " LO "
            lines.append(tag + _mps_field("BND", 10) + _mps_field(nm, 10)
                         + ("" if v.lb == -math.inf else _fmt(v.lb)))
        if v.ub != math.inf:
            lines.append(" UP " + _mps_field("BND", 10) + _mps_field(nm, 10) + _fmt(v.ub))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def max_violation(model: ModelIR, x: np.ndarray) -> float:
    """Largest constraint/bound violation of a point (0 when feasible).

    The point must match the model as given (no piecewise expansion here;
    epigraph terms affect only the objective, not feasibility).
    """
    worst = 0.0
    for v in model.variables:
        worst = max(worst, v.lb - x[v.vid], x[v.vid] - v.ub)
    for row in model.constraints:
        lhs = sum(c * x[vid] for vid, c in row.coeffs.items())
        if row.sense is Sense.LE:
            worst = max(worst, lhs - row.rhs)
        elif row.sense is Sense.GE:
            worst = max(worst, row.rhs - lhs)
        else:
            worst = max(worst, abs(lhs - row.rhs))
    return float(worst)
