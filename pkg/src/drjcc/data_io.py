"""Scenario ingestion/serialization and synthetic correlated sample generation.

CSV scenario files are headerless numeric by default; a single header line is
tolerated when the first row fails to parse as numbers.  The JSON layout is
``{"k": K, "n": N, "rows": [[...], ...]}``.  The synthetic generator draws a
unit-variance order-1 autoregressive chain across the coordinates and maps it
through the requested marginal, so lag-1 correlation is controlled while the
marginal stays exact; all randomness flows through a seeded 64-bit generator
(numpy PCG64), making every output reproducible from its seed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ScenarioSet

__all__ = [
    "load_scenarios",
    "save_scenarios",
    "SynthSpec",
    "synth_scenarios",
    "read_csv_table",
    "write_csv_table",
]


class ScenarioFormatError(ValueError):
    """Malformed scenario file (ragged rows, non-numeric cells, empty body)."""


def _parse_numeric_row(cells: list[str]) -> list[float] | None:
    try:
        return [float(c) for c in cells]
    except ValueError:
        return None


def load_scenarios(path: str | Path, fmt: str | None = None) -> ScenarioSet:
    """Read a scenario matrix from CSV or JSON (format inferred from suffix)."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "json":
        with open(path) as fh:
            doc = json.load(fh)
        rows = doc.get("rows")
        if not rows:
            raise ScenarioFormatError(f"{path}: no rows")
        mat = np.asarray(rows, dtype=float)
        if mat.ndim != 2:
            raise ScenarioFormatError(f"{path}: rows must form a matrix")
        if "k" in doc and int(doc["k"]) != mat.shape[1]:
            raise ScenarioFormatError(f"{path}: header k={doc['k']} but rows have {mat.shape[1]} columns")
        if "n" in doc and int(doc["n"]) != mat.shape[0]:
            raise ScenarioFormatError(f"{path}: header n={doc['n']} but file has {mat.shape[0]} rows")
        if not np.all(np.isfinite(mat)):
            raise ScenarioFormatError(f"{path}: non-finite entries")
        return ScenarioSet(mat)
    if fmt != "csv":
        raise ValueError(f"unknown scenario format {fmt!r}")
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            cells = [c.strip() for c in cells if c.strip() != ""]
            if not cells:
                continue
            parsed = _parse_numeric_row(cells)
            if parsed is None:
                if lineno == 1 and not rows:
                    continue  # single optional header line
                raise ScenarioFormatError(f"{path}: non-numeric cell in row {lineno}")
            if rows and len(parsed) != len(rows[0]):
                raise ScenarioFormatError(
                    f"{path}: row {lineno} has {len(parsed)} columns, expected {len(rows[0])}"
                )
            rows.append(parsed)
    if not rows:
        raise ScenarioFormatError(f"{path}: empty scenario file")
    mat = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(mat)):
        raise ScenarioFormatError(f"{path}: non-finite entries")
    return ScenarioSet(mat)


def save_scenarios(scen: ScenarioSet, path: str | Path, fmt: str | None = None) -> None:
    """Write the sample matrix with full float round-trip precision."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "json":
        doc = {
            "k": scen.dim,
            "n": scen.n,
            "rows": [[float(v) for v in row] for row in scen.samples],
        }
        path.write_text(json.dumps(doc))
        return
    if fmt != "csv":
        raise ValueError(f"unknown scenario format {fmt!r}")
    lines = [",".join(format(v, ".17g") for v in row) for row in scen.samples]
    path.write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class SynthSpec:
    """Specification of a synthetic correlated scenario matrix.

    ``marginal`` is ``("normal", mu, sigma)`` or ``("uniform", a, b)``;
    ``rho`` is the lag-1 correlation of the driving chain along the K
    coordinates; ``bounds`` optionally clips every entry.
    """

    k: int
    n: int
    marginal: tuple = ("normal", 0.0, 1.0)
    rho: float = 0.0
    bounds: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("k and n must be positive")
        if not (-1.0 < self.rho < 1.0):
            raise ValueError("rho must satisfy |rho| < 1")
        kind = self.marginal[0]
        if kind == "normal":
            if self.marginal[2] <= 0:
                raise ValueError("sigma must be positive")
        elif kind == "uniform":
            if self.marginal[1] >= self.marginal[2]:
                raise ValueError("uniform marginal needs a < b")
        else:
            raise ValueError(f"unknown marginal {kind!r}")
        if self.bounds is not None and self.bounds[0] >= self.bounds[1]:
            raise ValueError("invalid truncation bounds")


def synth_scenarios(spec: SynthSpec) -> ScenarioSet:
    """Generate the matrix described by ``spec``, deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal((spec.n, spec.k))
    chain = np.empty_like(z)
    chain[:, 0] = z[:, 0]
    scale = math.sqrt(1.0 - spec.rho**2)
    for j in range(1, spec.k):
        chain[:, j] = spec.rho * chain[:, j - 1] + scale * z[:, j]
    kind = spec.marginal[0]
    if kind == "normal":
        mu, sigma = spec.marginal[1], spec.marginal[2]
        out = mu + sigma * chain
    else:
        from scipy.special import ndtr

        a, b = spec.marginal[1], spec.marginal[2]
        out = a + (b - a) * ndtr(chain)
    if spec.bounds is not None:
        out = np.clip(out, spec.bounds[0], spec.bounds[1])
    return ScenarioSet(out)


def read_csv_table(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Read a delimited report back as (header, rows of strings)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        return [], []
    return rows[0], rows[1:]


def write_csv_table(path: str | Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
