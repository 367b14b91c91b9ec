"""Random walks driven by finitely supported step distributions.

The generator is numpy's PCG64 via ``default_rng(seed)``; the stream is
stable across platforms, so a seed fully determines a trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boundary import DivergenceReport, HoroVector, MyrbergStats, horo_limit, myrberg_stats
from .errors import ConfigError
from .space import IDENTITY, ModelSpace, Word

RNG_NAME = "numpy.default_rng (PCG64)"


class StepDistribution:
    """Finitely supported probability on words."""

    def __init__(self, space: ModelSpace, support: Sequence[Word], weights: Sequence[float], name: str = "custom"):
        if len(support) != len(weights) or not support:
            raise ConfigError("mu", "support and weights must be non-empty and of equal length")
        w = np.asarray(weights, dtype=float)
        if np.any(w <= 0):
            raise ConfigError("mu", "weights must be positive")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ConfigError("mu", f"weights sum to {w.sum()}, not 1")
        self.space = space
        self.support = [space.validate(s) for s in support]
        self.weights = w / w.sum()
        self.name = name

    @classmethod
    def srw(cls, space: ModelSpace) -> "StepDistribution":
        gens = list(space.generators)
        return cls(space, gens, [1.0 / len(gens)] * len(gens), "srw")

    @classmethod
    def dirac(cls, space: ModelSpace, word: Word) -> "StepDistribution":
        return cls(space, [word], [1.0], f"dirac:{space.format(word)}")

    @classmethod
    def from_config(cls, space: ModelSpace, cfg) -> "StepDistribution":
        """``"srw"``, ``"dirac:<word>"`` or a mapping ``{word: weight}``."""
        if isinstance(cfg, str):
            if cfg == "srw":
                return cls.srw(space)
            if cfg.startswith("dirac:"):
                return cls.dirac(space, space.parse(cfg[len("dirac:"):]))
            raise ConfigError("mu", f"unknown step distribution {cfg!r}")
        if isinstance(cfg, dict):
            items = list(cfg.items())
            return cls(space, [space.parse(str(k)) for k, _ in items], [float(v) for _, v in items])
        raise ConfigError("mu", "step distribution must be a preset name or a mapping")

    def generates_semigroup(self, depth: int = 6) -> bool:
        """Whether every generator is a product of at most ``depth`` support elements."""
        targets = set(self.space.generators)
        frontier = {IDENTITY}
        seen = set()
        for _ in range(depth):
            frontier = {self.space.multiply(g, s) for g in frontier for s in self.support} - seen
            seen |= frontier
            if targets <= seen:
                return True
        return False

    @property
    def irreducible(self) -> bool:
        return self.generates_semigroup()

    def record(self) -> dict:
        return {"name": self.name, "support": [self.space.format(s) for s in self.support],
                "weights": [float(w) for w in self.weights]}


class _WordStack:
    """Mutable normal form for appending steps one at a time."""

    def __init__(self):
        self.syl = []
        self.length = 0

    def push(self, step: Word):
        for f, v in step:
            if self.syl and self.syl[-1][0] == f:
                _, u = self.syl.pop()
                old = sum(abs(x) for x in u)
                w = tuple(a + b for a, b in zip(u, v))
                new = sum(abs(x) for x in w)
                self.length += new - old
                if any(w):
                    self.syl.append((f, w))
            else:
                self.syl.append((f, v))
                self.length += sum(abs(x) for x in v)

    def word(self) -> Word:
        return tuple(self.syl)


@dataclass
class Trajectory:
    seed: int
    n_steps: int
    checkpoints: list
    positions: list
    lengths: list
    increments: Optional[np.ndarray] = None
    distribution: dict = field(default_factory=dict)

    @property
    def final(self) -> Word:
        return self.positions[-1]


def simulate(space: ModelSpace, mu: StepDistribution, n_steps: int, seed: int, spacing: Optional[int] = None,
             keep_increments: bool = False) -> Trajectory:
    """``w_n = g_1 ... g_n`` with i.i.d. steps; positions are stored every ``spacing`` steps and at the end."""
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    spacing = spacing or max(1, n_steps // 100)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(mu.support), size=n_steps, p=mu.weights)
    stack = _WordStack()
    cps, pos, lens = [0], [IDENTITY], [0]
    for n in range(1, n_steps + 1):
        stack.push(mu.support[idx[n - 1]])
        if n % spacing == 0 or n == n_steps:
            cps.append(n)
            pos.append(stack.word())
            lens.append(stack.length)
    return Trajectory(seed, n_steps, cps, pos, lens, idx if keep_increments else None, mu.record())


def drift(traj: Trajectory) -> dict:
    curve = [(n, l / n) for n, l in zip(traj.checkpoints, traj.lengths) if n > 0]
    return {"curve": curve, "terminal": curve[-1][1] if curve else 0.0}


def _distance_long(space: ModelSpace, x: Word, y: Word) -> int:
    # bypasses the prefix cache, which is sized for short words
    return space.length(space.multiply(space.inverse(x), y))


def gromov_product(space: ModelSpace, x: Word, y: Word) -> float:
    return (space.length(x) + space.length(y) - _distance_long(space, x, y)) / 2


@dataclass
class ConvergenceReport:
    seed: int
    R: int
    window: int
    limit: object
    gromov_curve: list
    late_min_gromov: float
    myrberg: Optional[MyrbergStats]

    @property
    def stabilized(self) -> bool:
        return isinstance(self.limit, HoroVector)

    def record(self, space: ModelSpace) -> dict:
        out = {"seed": self.seed, "R": self.R, "window": self.window, "stabilized": self.stabilized,
               "late_min_gromov": self.late_min_gromov,
               "gromov_curve": [[n, g] for n, g in self.gromov_curve]}
        if isinstance(self.limit, DivergenceReport):
            out["unstable_points"] = len(self.limit.oscillating)
        if self.myrberg is not None:
            out["myrberg"] = self.myrberg.record(space)
        return out


def boundary_convergence(space: ModelSpace, traj: Trajectory, R: int, w: int = 5,
                         F: Sequence[Word] = (), r: int = 0, late: int = 10) -> ConvergenceReport:
    """Horovector stabilization over the last ``w`` checkpoints, consecutive Gromov
    products, and barrier recurrence along the canonical geodesic to ``w_n``."""
    limit = horo_limit(space, traj.positions, R, w)
    curve = []
    for k in range(1, len(traj.positions) - 1):
        curve.append((traj.checkpoints[k], gromov_product(space, traj.positions[k], traj.positions[k + 1])))
    tail = [g for _, g in curve[-late:]]
    late_min = min(tail) if tail else 0.0
    stats = None
    if F:
        stats = myrberg_stats(space, space.letters(traj.final), F, r)
    return ConvergenceReport(traj.seed, R, w, limit, curve, late_min, stats)


def tree_drift(k: int) -> float:
    """Speed of simple random walk on the free group of rank ``k``."""
    return (2 * k - 2) / (2 * k)


def diffusive_band(traj: Trajectory) -> bool:
    return traj.lengths[-1] <= 5 * math.sqrt(max(1, traj.n_steps))
