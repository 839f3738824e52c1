"""Shared fixtures: the 1-D toy instance used throughout and a random
instance factory for the property sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from drjcc import AmbiguityConfig, NormKind, SafetySystem, ScenarioSet


@dataclass(frozen=True)
class Instance:
    scen: ScenarioSet
    sys: SafetySystem
    amb: AmbiguityConfig

    @property
    def parts(self):
        return self.scen, self.sys, self.amb


@pytest.fixture
def t1() -> Instance:
    """K=1, P=1 toy: row x <= xi + 1, samples {0.0,0.1,0.2,0.3},
    eps=0.5 (k=2), theta=0.05, x box [0,2]."""
    return Instance(
        ScenarioSet(np.array([[0.0], [0.1], [0.2], [0.3]])),
        SafetySystem(a=[[1.0]], b=[[1.0]], d=[1.0], x_bounds=[[0.0, 2.0]]),
        AmbiguityConfig(0.5, 0.05),
    )


def random_instance(
    rng: np.random.Generator,
    k_max: int = 3,
    p_max: int = 4,
    n_max: int = 20,
    eps_choices=(0.05, 0.1, 0.3),
    theta_choices=(0.01, 0.1),
    norm: NormKind = NormKind.L2,
) -> Instance:
    """Small random instance with a bounded decision box.

    Row offsets are drawn so that the box typically straddles the feasible
    boundary; b rows are rejected until clearly nonzero.
    """
    k = int(rng.integers(1, k_max + 1))
    p = int(rng.integers(1, p_max + 1))
    n = int(rng.integers(max(4, k), n_max + 1))
    l_dim = int(rng.integers(1, 3))
    a = rng.normal(0.0, 1.0, size=(p, l_dim))
    b = rng.normal(0.0, 1.0, size=(p, k))
    while np.any(np.linalg.norm(b, axis=1) < 0.3):
        b = rng.normal(0.0, 1.0, size=(p, k))
    d = rng.uniform(0.2, 1.0, size=p) * (np.abs(a).sum(axis=1) + 0.5)
    samples = rng.normal(0.0, 0.5, size=(n, k))
    bounds = np.column_stack([np.full(l_dim, -1.0), np.full(l_dim, 1.0)])
    return Instance(
        ScenarioSet(samples),
        SafetySystem(a=a, b=b, d=d, norm=norm, x_bounds=bounds),
        AmbiguityConfig(float(rng.choice(eps_choices)), float(rng.choice(theta_choices))),
    )


def sample_box(rng: np.random.Generator, sys: SafetySystem, n: int) -> np.ndarray:
    lo, hi = sys.x_bounds[:, 0], sys.x_bounds[:, 1]
    return rng.uniform(lo, hi, size=(n, sys.x_dim))
