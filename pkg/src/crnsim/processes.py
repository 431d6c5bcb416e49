"""Standalone samplers for three continuous-time Markov processes.

* ``sample_decay``: pure-death chain from N where the j-th surviving unit
  count decays at total rate lam*j; equivalently, each unit survives to
  time t independently with probability exp(-lam*t).
* ``sample_walk_z``: biased walk on the integers with constant forward
  rate f_hat and reverse rate r_hat; its value at t is the difference of
  two independent Poisson event counts.
* ``sample_walk_reflecting``: walk on the nonnegative integers from 0
  with constant forward rate delta_f*N and reverse rate lambda_r*j out of
  state j, tracked together with its running maximum.

All samplers are exact event simulations (the reflecting walk needs its
whole path for the running maximum; the others use exact event-count
laws). Batch variants vectorize across draws and are what the Monte
Carlo bound validation consumes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class DecayParams:
    """Initial value N, decay constant lam, horizon t (all positive)."""

    N: int
    lam: float
    t: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be a positive integer")
        if not (self.lam > 0 and self.t > 0):
            raise DomainError("lam and t must be positive")


@dataclass(frozen=True)
class WalkParams:
    """Forward rate f_hat, reverse rate r_hat, horizon t (all positive)."""

    f_hat: float
    r_hat: float
    t: float

    def __post_init__(self):
        if not (self.f_hat > 0 and self.r_hat > 0 and self.t > 0):
            raise DomainError("f_hat, r_hat and t must be positive")


@dataclass(frozen=True)
class ReflectingParams:
    """Scale N, forward coefficient delta_f, reverse coefficient lambda_r,
    horizon t (all positive)."""

    N: int
    delta_f: float
    lambda_r: float
    t: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be a positive integer")
        if not (self.delta_f > 0 and self.lambda_r > 0 and self.t > 0):
            raise DomainError("delta_f, lambda_r and t must be positive")


def sample_decay_batch(p: DecayParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """Values of the decay process at time t for ``size`` independent draws.

    Simulates the event chain: the i-th decay waits an exponential time
    with rate lam*(N-i+1); the value at t is N minus the number of decays
    whose cumulative time fits inside t. Marginally the value is
    Binomial(N, exp(-lam*t)), which tests exploit as an oracle.
    """
    rates = p.lam * np.arange(p.N, 0, -1, dtype=np.float64)
    out = np.empty(size, dtype=np.int64)
    chunk = max(1, min(size, 4_000_000 // p.N))
    for start in range(0, size, chunk):
        k = min(chunk, size - start)
        waits = rng.exponential(1.0, size=(k, p.N)) / rates
        elapsed = np.cumsum(waits, axis=1)
        decays = (elapsed <= p.t).sum(axis=1)
        out[start : start + k] = p.N - decays
    return out


def sample_decay(p: DecayParams, rng: np.random.Generator) -> int:
    """One draw of the decay process value at time t."""
    return int(sample_decay_batch(p, 1, rng)[0])


def sample_walk_z_batch(p: WalkParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """Walk values at time t: forward events minus reverse events.

    Both rates are state-independent, so the counts of forward and
    reverse events over [0, t] are independent Poisson variables with
    means f_hat*t and r_hat*t; the walk value is their difference.
    """
    fwd = rng.poisson(p.f_hat * p.t, size).astype(np.int64)
    rev = rng.poisson(p.r_hat * p.t, size).astype(np.int64)
    return fwd - rev


def sample_walk_z(p: WalkParams, rng: np.random.Generator) -> int:
    return int(sample_walk_z_batch(p, 1, rng)[0])


def sample_walk_reflecting_batch(
    p: ReflectingParams, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """(value at t, running max over [0, t]) for ``size`` draws.

    Event-driven in lockstep: every active draw advances one event per
    sweep; a draw retires once its next event would land past the
    horizon, freezing its value. From state 0 the reverse rate is zero,
    so the selection uniform (strictly below 1) always steps forward and
    the barrier needs no special casing.
    """
    fwd = p.delta_f * p.N
    state = np.zeros(size, dtype=np.int64)
    vmax = np.zeros(size, dtype=np.int64)
    tnow = np.zeros(size)
    idx = np.arange(size)
    while idx.size:
        rates = fwd + p.lambda_r * state[idx]
        tnext = tnow[idx] + rng.exponential(1.0, idx.size) / rates
        alive = tnext <= p.t
        live = idx[alive]
        if live.size == 0:
            break
        tnow[live] = tnext[alive]
        forward = rng.random(live.size) * rates[alive] < fwd
        state[live] += np.where(forward, 1, -1)
        vmax[live] = np.maximum(vmax[live], state[live])
        idx = live
    return state, vmax


def sample_walk_reflecting(p: ReflectingParams, rng: np.random.Generator) -> tuple[int, int]:
    """One draw: (value at t, running max over [0, t])."""
    value, vmax = sample_walk_reflecting_batch(p, 1, rng)
    return int(value[0]), int(vmax[0])


def batch_to_csv(values, fileobj, running_max=None):
    """Emit draws as CSV rows (draw_index, value[, running_max])."""
    w = csv.writer(fileobj)
    if running_max is None:
        w.writerow(["draw_index", "value"])
        for i, v in enumerate(values):
            w.writerow([i, int(v)])
    else:
        w.writerow(["draw_index", "value", "running_max"])
        for i, (v, m) in enumerate(zip(values, running_max)):
            w.writerow([i, int(v), int(m)])
