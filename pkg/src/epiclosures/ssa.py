"""Gillespie sampling of the birth-death chains.

Entirely independent of the master-equation solver: paths are drawn from
the jump process itself, so ensemble histograms provide an external check
on the integrated probability vectors.  Each run owns a counter-based
Philox stream derived from (seed, run index), which makes results
reproducible regardless of execution order and lets runs be farmed out
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ParameterError
from .generator import ProbabilityVector, RateCoefficients


@dataclass(frozen=True)
class SsaConfig:
    """Ensemble size, recording grid and seed for one experiment."""

    runs: int
    t_record: tuple[float, ...]
    seed: int = 0

    def __post_init__(self):
        t_record = tuple(float(t) for t in self.t_record)
        if self.runs < 1:
            raise ParameterError(f"runs must be >= 1, got {self.runs}")
        if len(t_record) == 0:
            raise ParameterError("t_record must be nonempty")
        if any(t < 0.0 for t in t_record):
            raise ParameterError("recording times must be nonnegative")
        if any(b <= a for a, b in zip(t_record, t_record[1:])):
            raise ParameterError("t_record must be strictly increasing")
        object.__setattr__(self, "t_record", t_record)


@njit
def _simulate_into(a, c, k0, t_record, out, rng):
    # One exact path: at state k wait Exp(a[k]+c[k]), then step up with
    # probability a[k]/(a[k]+c[k]).  The state holding at each recording
    # time is written into out.
    k = k0
    t = 0.0
    i = 0
    n_rec = t_record.shape[0]
    while i < n_rec:
        total = a[k] + c[k]
        if total == 0.0:
            while i < n_rec:  # absorbed: state constant forever
                out[i] = k
                i += 1
            return
        t_next = t + rng.exponential(1.0 / total)
        while i < n_rec and t_record[i] < t_next:
            out[i] = k
            i += 1
        t = t_next
        if rng.random() * total < a[k]:
            k += 1
        else:
            k -= 1


def gillespie_run(coeffs: RateCoefficients, k0: int, config: SsaConfig) -> np.ndarray:
    """Simulate the ensemble; returns states of shape (runs, len(t_record)).

    Run i draws exclusively from the Philox stream spawned for (seed, i),
    so any subset of runs can be regenerated bit-for-bit in isolation.
    """
    if not 0 <= k0 <= coeffs.N:
        raise ParameterError(f"k0 must lie in [0, N], got k0={k0}, N={coeffs.N}")
    t_record = np.asarray(config.t_record, dtype=float)
    out = np.empty((config.runs, t_record.shape[0]), dtype=np.int64)
    children = np.random.SeedSequence(config.seed).spawn(config.runs)
    for i in range(config.runs):
        rng = np.random.Generator(np.random.Philox(children[i]))
        _simulate_into(coeffs.a, coeffs.c, k0, t_record, out[i], rng)
    return out


def gillespie_path(coeffs: RateCoefficients, k0: int, t_max: float,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Full jump path (times, states) until absorption or t_max.

    Small-scale diagnostic companion to ``gillespie_run``; the final entry
    repeats the resting state at its last jump time (or at t_max when the
    path is cut off while still active).
    """
    if not 0 <= k0 <= coeffs.N:
        raise ParameterError(f"k0 must lie in [0, N], got k0={k0}, N={coeffs.N}")
    times = [0.0]
    states = [k0]
    t, k = 0.0, k0
    a, c = coeffs.a, coeffs.c
    while True:
        total = a[k] + c[k]
        if total == 0.0:
            break
        t += rng.exponential(1.0 / total)
        if t > t_max:
            break
        k = k + 1 if rng.random() * total < a[k] else k - 1
        times.append(t)
        states.append(k)
    return np.asarray(times), np.asarray(states, dtype=np.int64)


def empirical_distribution(samples, N: int, t: float = 0.0) -> ProbabilityVector:
    """Normalized histogram of sampled states over 0..N."""
    samples = np.asarray(samples, dtype=np.int64).ravel()
    if samples.size == 0:
        raise ParameterError("need at least one sample")
    if samples.min() < 0 or samples.max() > N:
        raise ParameterError("samples fall outside the state space 0..N")
    counts = np.bincount(samples, minlength=N + 1)
    return ProbabilityVector(p=counts / samples.size, t=t)


def total_variation(p, q) -> float:
    """Total-variation distance, half the L1 difference of the two vectors."""
    pv = p.p if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=float)
    qv = q.p if isinstance(q, ProbabilityVector) else np.asarray(q, dtype=float)
    if pv.shape != qv.shape:
        raise ParameterError("distributions live on different state spaces")
    return 0.5 * float(np.abs(pv - qv).sum())
