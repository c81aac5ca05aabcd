"""Seeded round-by-round simulation of the steering game.

Each round draws ``j`` and ``s`` uniformly, then one joint outcome
``(a, b)`` from the exact single-round distribution of the players
(``a`` may be null). Only rounds where Alice answered are scored.

Sweep points get child seeds from ``numpy.random.SeedSequence([seed, index])``
(first 64-bit word of its generated state).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .errors import ContractError, NoValidRoundsError, QRSError
from .game import (
    CheatStrategy,
    Exact,
    PreparationModel,
    ScoreSpec,
    Visibility,
    cheat_outcome_probs,
    cheat_score,
    exact_honest_score,
    honest_outcome_probs,
)
from .bounds import steering_bound
from .settings import builtin_directions

__all__ = [
    "Honest",
    "Cheat",
    "SimConfig",
    "ScoreEstimate",
    "SweepPoint",
    "SWEEP_AXES",
    "outcome_table",
    "exact_value",
    "child_seed",
    "simulate",
    "sweep",
]

log = logging.getLogger(__name__)

_CHUNK = 1 << 16
SWEEP_AXES = ("eta_h", "eta_m", "visibility", "n-family")


@dataclass(frozen=True)
class Honest:
    rho_ab: np.ndarray
    eta_m: float = 1.0


@dataclass(frozen=True)
class Cheat:
    strategy: CheatStrategy


Players = Union[Honest, Cheat]


@dataclass(frozen=True)
class SimConfig:
    spec: ScoreSpec
    players: Players
    rounds: int
    seed: int = 0
    model: PreparationModel = Exact()

    def __post_init__(self):
        if int(self.rounds) < 1:
            raise ContractError(f"rounds must be >= 1, got {self.rounds}")
        if not 0 <= int(self.seed) < 2**64:
            raise ContractError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class ScoreEstimate:
    mean: float
    std_error: float
    eta_h_hat: float
    rounds: int
    rounds_valid: int
    per_js_counts: dict[tuple[int, int], tuple[int, int, int]]
    seed: int


def outcome_table(cfg: SimConfig) -> tuple[np.ndarray, float]:
    """Per-round outcome distribution and the bound used for payoffs.

    Returns ``(probs, c)``: ``probs`` has shape ``(n, 2, 3, 2)`` over
    ``(j, s, a in (+1, -1, null), b in (0, 1))`` and sums to 1 per ``(j, s)``.
    Honest players use the declared bound; adversaries are charged the bound
    at their own induced heralding.
    """
    spec = cfg.spec
    if isinstance(cfg.players, Honest):
        cond = honest_outcome_probs(cfg.players.rho_ab, spec.ds, cfg.model, cfg.players.eta_m)
        probs = np.zeros((spec.n, 2, 3, 2))
        probs[:, :, :2, :] = spec.eta_h * cond
        probs[:, :, 2, 0] = 1.0 - spec.eta_h
        return probs, spec.bound
    probs = cheat_outcome_probs(cfg.players.strategy, spec.ds, cfg.model)
    eta = float(probs[:, :, :2, :].sum() / (2 * spec.n))
    c = steering_bound(spec.ds, eta).value if eta > 0 else spec.bound
    return probs, c


def exact_value(cfg: SimConfig) -> float:
    """Closed-form expectation of :func:`simulate`'s ``mean``."""
    if isinstance(cfg.players, Honest):
        return exact_honest_score(cfg.players.rho_ab, cfg.spec, cfg.model, cfg.players.eta_m).total
    return cheat_score(cfg.players.strategy, cfg.spec, cfg.model)


def simulate(cfg: SimConfig) -> ScoreEstimate:
    spec = cfg.spec
    n = spec.n
    probs, c = outcome_table(cfg)
    cum = np.cumsum(probs.reshape(n, 2, 6), axis=-1)
    cum[..., -1] = 1.0
    rng = np.random.Generator(np.random.PCG64(int(cfg.seed)))

    valid_tot = 0
    pay_sum = 0.0
    pay_sq = 0.0
    counts = np.zeros((n, 2, 3), dtype=np.int64)
    s_vals = np.array([1, -1])
    a_vals = np.array([1, -1, 0])
    remaining = int(cfg.rounds)
    while remaining:
        size = min(_CHUNK, remaining)
        remaining -= size
        j = rng.integers(0, n, size=size)
        si = rng.integers(0, 2, size=size)
        u = rng.random(size=size)
        cat = np.minimum((u[:, None] >= cum[j, si]).sum(axis=1), 5)
        ai, b = cat // 2, cat % 2
        valid = ai < 2
        a, s = a_vals[ai], s_vals[si]
        pay = (a * s - spec.r * c) * b
        pay_v = pay[valid]
        valid_tot += int(valid.sum())
        pay_sum += float(pay_v.sum())
        pay_sq += float(np.dot(pay_v, pay_v))
        flat = (j * 2 + si)[valid]
        counts[..., 0] += np.bincount(flat, minlength=2 * n).reshape(n, 2)
        counts[..., 1] += np.bincount(flat, weights=b[valid], minlength=2 * n).reshape(n, 2).astype(np.int64)
        counts[..., 2] += np.bincount(flat, weights=(a * b)[valid], minlength=2 * n).reshape(n, 2).astype(np.int64)

    if valid_tot == 0:
        raise NoValidRoundsError(f"no valid rounds in {cfg.rounds} (Alice never answered)")
    mean = pay_sum / valid_tot
    if valid_tot > 1:
        var = max(0.0, (pay_sq - valid_tot * mean * mean) / (valid_tot - 1))
        stderr = math.sqrt(var / valid_tot)
    else:
        stderr = 0.0
    per_js = {
        (jj + 1, int(s_vals[k])): tuple(int(x) for x in counts[jj, k])
        for jj in range(n)
        for k in range(2)
    }
    return ScoreEstimate(mean, stderr, valid_tot / cfg.rounds, int(cfg.rounds), valid_tot, per_js, int(cfg.seed))


def child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SweepPoint:
    value: object
    seed: int
    estimate: ScoreEstimate | None = None
    exact: float | None = None
    error: str | None = None


def _respec(base: SimConfig, ds=None, eta_h=None, model=None) -> ScoreSpec:
    ds = base.spec.ds if ds is None else ds
    eta_h = base.spec.eta_h if eta_h is None else eta_h
    model = base.model if model is None else model
    if base.spec.r_from_preparation:
        return ScoreSpec.with_preparation(ds, eta_h, model)
    return ScoreSpec.create(ds, eta_h, base.spec.r)


def _point_config(base: SimConfig, axis: str, value, seed: int) -> SimConfig:
    if axis == "eta_h":
        return replace(base, spec=_respec(base, eta_h=float(value)), seed=seed)
    if axis == "eta_m":
        if not isinstance(base.players, Honest):
            raise ContractError("eta_m sweeps apply to honest players only")
        return replace(base, players=replace(base.players, eta_m=float(value)), seed=seed)
    if axis == "visibility":
        model = Visibility(float(value))
        return replace(base, model=model, spec=_respec(base, model=model), seed=seed)
    if axis == "n-family":
        ds = builtin_directions(str(value))
        return replace(base, spec=_respec(base, ds=ds), seed=seed)
    raise ContractError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def sweep(base: SimConfig, axis: str, values: Sequence) -> list[SweepPoint]:
    """Simulate one point per value; failures are recorded and the sweep goes on."""
    if axis not in SWEEP_AXES:
        raise ContractError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    out = []
    for index, value in enumerate(values):
        seed = child_seed(base.seed, index)
        try:
            cfg = _point_config(base, axis, value, seed)
            out.append(SweepPoint(value, seed, simulate(cfg), exact_value(cfg)))
        except QRSError as exc:
            log.warning("sweep point %s=%r failed: %s", axis, value, exc)
            out.append(SweepPoint(value, seed, error=str(exc)))
    return out
