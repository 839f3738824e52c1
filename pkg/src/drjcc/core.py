"""Scenario data, affine safety systems, norms, and sample distances.

The basic objects here are shared by every reformulation: a set of observed
samples of the uncertain vector, a system of affine safety rows
``a_p . x <= b_p . xi + d_p``, and the risk/radius pair that fixes the
ambiguity ball around the empirical distribution.  On top of those this
module provides the dual norms, the per-row order statistics (the cutoff
value ``q_p`` and the index set of samples strictly below it), and the
signed/unsigned distance of a sample to the unsafe region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "NormKind",
    "ScenarioSet",
    "SafetySystem",
    "AmbiguityConfig",
    "OrderData",
    "dual_norm",
    "order_data",
    "distance",
    "distance_profile",
    "distance_hat",
]

# Rows with a (dual) norm below this are rejected outright: dividing by them
# would blow up every scaled constraint.
MIN_ROW_NORM = 1e-12


class NormKind(Enum):
    """Norm used on the uncertainty space; the dual pairs are L1<->Linf, L2<->L2."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown norm {text!r}; supported: l1, l2, linf"
            ) from None


def dual_norm(b: np.ndarray, norm: NormKind) -> float:
    """Dual norm of a row vector (0 iff b == 0)."""
    b = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(b)):
        raise ValueError("dual_norm: non-finite entries")
    if norm is NormKind.L1:
        return float(np.max(np.abs(b))) if b.size else 0.0
    if norm is NormKind.L2:
        return float(np.linalg.norm(b))
    return float(np.sum(np.abs(b)))


def primal_norm(v: np.ndarray, norm: NormKind) -> float:
    """Norm on the uncertainty space itself (used by the Lipschitz property)."""
    v = np.asarray(v, dtype=float)
    if norm is NormKind.L1:
        return float(np.sum(np.abs(v)))
    if norm is NormKind.L2:
        return float(np.linalg.norm(v))
    return float(np.max(np.abs(v))) if v.size else 0.0


@dataclass(frozen=True)
class ScenarioSet:
    """N observed samples of the uncertain vector, each a row of length K.

    ``holdout`` optionally carries additional samples that are never used to
    build constraints, only to evaluate out-of-sample satisfaction.
    """

    samples: np.ndarray
    holdout: np.ndarray | None = None

    def __post_init__(self):
        samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if samples.ndim != 2 or samples.shape[0] < 1:
            raise ValueError("samples must be a nonempty N x K matrix")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain non-finite entries")
        object.__setattr__(self, "samples", samples)
        if self.holdout is not None:
            holdout = np.atleast_2d(np.asarray(self.holdout, dtype=float))
            if holdout.shape[1] != samples.shape[1]:
                raise ValueError("holdout dimension differs from samples")
            if not np.all(np.isfinite(holdout)):
                raise ValueError("holdout contains non-finite entries")
            object.__setattr__(self, "holdout", holdout)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def with_holdout(self, holdout: np.ndarray) -> "ScenarioSet":
        return ScenarioSet(self.samples, holdout)


@dataclass(frozen=True)
class SafetySystem:
    """P affine safety rows ``a_p . x <= b_p . xi + d_p`` plus the box on x.

    ``dual_norms`` is cached at construction; rows whose dual norm is below
    ``MIN_ROW_NORM`` are rejected.  ``x_bounds`` is an L x 2 array of
    (lower, upper) pairs; entries may be infinite, but any coordinate that a
    row actually touches must be finite before a big-M can be derived.
    """

    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    norm: NormKind = NormKind.L2
    x_bounds: np.ndarray | None = None
    dual_norms: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.atleast_2d(np.asarray(self.b, dtype=float))
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        if a.shape[0] != b.shape[0] or a.shape[0] != d.shape[0]:
            raise ValueError("row count mismatch between a, b, d")
        if a.shape[0] < 1:
            raise ValueError("need at least one safety row")
        duals = np.array([dual_norm(row, self.norm) for row in b])
        if np.any(duals < MIN_ROW_NORM):
            raise ValueError(
                f"safety row with dual norm below {MIN_ROW_NORM:g}; "
                "uncertainty must enter every row"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "dual_norms", duals)
        if self.x_bounds is not None:
            xb = np.asarray(self.x_bounds, dtype=float).reshape(-1, 2)
            if xb.shape[0] != a.shape[1]:
                raise ValueError("x_bounds length differs from decision dimension")
            if np.any(xb[:, 0] > xb[:, 1]):
                raise ValueError("inverted x bounds")
            object.__setattr__(self, "x_bounds", xb)

    @property
    def n_rows(self) -> int:
        return self.a.shape[0]

    @property
    def x_dim(self) -> int:
        return self.a.shape[1]

    @property
    def xi_dim(self) -> int:
        return self.b.shape[1]

    def row_values(self, x: np.ndarray) -> np.ndarray:
        """a_p . x for every row."""
        return self.a @ np.asarray(x, dtype=float)

    def scaled_slacks(self, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """(b_p . xi + d_p - a_p . x) / ||b_p||_* for every row (signed)."""
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return (self.b @ xi + self.d - self.a @ x) / self.dual_norms


@dataclass(frozen=True)
class AmbiguityConfig:
    """Risk level and Wasserstein radius of the ambiguity ball.

    Both bounds are strict: the exact reformulation this toolkit is built on
    requires epsilon in (0,1) and theta > 0.
    """

    epsilon: float
    theta: float

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError("epsilon must lie strictly inside (0, 1)")
        if not (self.theta > 0.0):
            raise ValueError("theta must be strictly positive")

    def k(self, n: int) -> int:
        """floor(epsilon * N); the small cushion absorbs float rounding of
        products like 0.29 * 100 that are mathematically integral."""
        return int(math.floor(self.epsilon * n + 1e-9))


@dataclass(frozen=True)
class OrderData:
    """Per-row order statistics of the projected samples b_p . xi_i.

    ``q`` holds the (k+1)-th smallest projected value per row and
    ``below_q[p]`` the indices with value strictly below it (at most k of
    them; fewer when ties sit exactly at the cutoff).
    """

    q: np.ndarray
    below_q: list[np.ndarray]
    sort_order: list[np.ndarray]
    k: int

    @property
    def n_below(self) -> int:
        return int(sum(len(idx) for idx in self.below_q))


def order_data(scen: ScenarioSet, sys: SafetySystem, amb: AmbiguityConfig) -> OrderData:
    """Compute q_p and the strict below-cutoff index set for every row."""
    k = amb.k(scen.n)
    if k + 1 > scen.n:
        raise ValueError("need at least k+1 samples")
    q = np.empty(sys.n_rows)
    below: list[np.ndarray] = []
    orders: list[np.ndarray] = []
    proj = scen.samples @ sys.b.T  # N x P
    for p in range(sys.n_rows):
        vals = proj[:, p]
        order = np.argsort(vals, kind="stable")
        q[p] = vals[order[k]]
        below.append(np.flatnonzero(vals < q[p]))
        orders.append(order)
    return OrderData(q=q, below_q=below, sort_order=orders, k=k)


def distance(x: np.ndarray, xi: np.ndarray, sys: SafetySystem) -> float:
    """Distance from a sample to the complement of the safety region at x.

    Zero exactly when some row is violated or tight at (x, xi).
    """
    return float(max(0.0, np.min(sys.scaled_slacks(x, xi))))


def distance_profile(x: np.ndarray, scen: ScenarioSet, sys: SafetySystem) -> np.ndarray:
    """Vector of distances for every sample at once."""
    x = np.asarray(x, dtype=float)
    slack = (scen.samples @ sys.b.T + sys.d - sys.a @ x) / sys.dual_norms  # N x P
    return np.maximum(0.0, slack.min(axis=1))


def distance_hat(x: np.ndarray, xi: np.ndarray, sys: SafetySystem, kappa_i: float) -> float:
    """Conservative surrogate: kappa times the signed minimum scaled slack.

    Unlike :func:`distance` this may go negative; it never exceeds the true
    distance for kappa in [0, 1].
    """
    if not (0.0 <= kappa_i <= 1.0):
        raise ValueError("kappa must lie in [0, 1]")
    return float(kappa_i * np.min(sys.scaled_slacks(x, xi)))
