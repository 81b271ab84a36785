"""Closed-form steady states for all models and the exact chain reference.

The three reduced models have algebraic endemic equilibria (prevalence
I/N):

    pair:      1 - gamma/beta
    triple:    (N-1) ((N-2) beta - N gamma) / ((N-1)(N-2) beta - N gamma)
    binomial:  (N q^2 - 1) / (N q - 1),  q = 1 - gamma/beta

For the exact chain state 0 is absorbing, so the long-run limit is
extinction; the meaningful reference is the quasi-stationary (conditional
on non-extinction) mean.  On the chain restricted to k >= 1 detailed
balance gives the stationary weights

    w[k+1] ~ A_k = beta^k (N-1)(N-2)...(N-k) / (gamma^k (k+1) N^k),  A_0 = 1

and the reference prevalence sum((k+1) A_k) / (N sum(A_k)).  The A_k span
hundreds of orders of magnitude for N in the hundreds, so all sums are
evaluated in log space.

Below the endemic threshold every operation returns the disease-free value
0 and emits BelowThresholdWarning as the flag.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import BelowThresholdWarning, ParameterError
from .generator import ProbabilityVector


def _below_threshold(label: str) -> float:
    warnings.warn(
        f"{label}: below the endemic threshold, returning the disease-free value 0",
        BelowThresholdWarning, stacklevel=3,
    )
    return 0.0


def _check_rates(beta: float, gamma: float, N: int | None = None) -> None:
    if beta <= 0 or gamma <= 0:
        raise ParameterError("rates must be positive")
    if N is not None and N < 2:
        raise ParameterError(f"N must be >= 2, got {N}")


def ss_pair(beta: float, gamma: float) -> float:
    """Endemic prevalence of the mean-field (pair-closed) model: 1 - gamma/beta."""
    _check_rates(beta, gamma)
    if beta <= gamma:
        return _below_threshold("pair closure")
    return 1.0 - gamma / beta


def ss_triple(beta: float, gamma: float, N: int) -> float:
    """Endemic prevalence of the triple-closed pairwise model."""
    _check_rates(beta, gamma, N)
    numerator = (N - 1.0) * ((N - 2.0) * beta - N * gamma)
    if numerator <= 0.0:
        return _below_threshold("triple closure")
    return numerator / ((N - 1.0) * (N - 2.0) * beta - N * gamma)


def ss_binomial(beta: float, gamma: float, N: int) -> float:
    """Endemic prevalence of the binomial-closed moment model."""
    _check_rates(beta, gamma, N)
    q = 1.0 - gamma / beta
    if q <= 0.0 or N * q <= 1.0 or N * q * q <= 1.0:
        return _below_threshold("binomial closure")
    return (N * q * q - 1.0) / (N * q - 1.0)


def _log_weights(beta: float, gamma: float, N: int) -> np.ndarray:
    # log A_k = k log(beta/(gamma N)) + sum_{j=1..k} log(N-j) - log(k+1)
    k = np.arange(N, dtype=float)
    log_falling = np.concatenate((
        [0.0], np.cumsum(np.log(N - np.arange(1.0, N)))
    ))
    return k * np.log(beta / (gamma * N)) + log_falling - np.log1p(k)


def ss_exact(beta: float, gamma: float, N: int) -> float:
    """Quasi-stationary mean prevalence of the exact chain.

    Evaluates sum((k+1) A_k) / (N sum(A_k)) with both sums taken in log
    space, which keeps the computation exact-to-round-off for any N even
    though the raw A_k overflow far beyond double range.
    """
    _check_rates(beta, gamma, N)
    if beta <= gamma:
        return _below_threshold("exact chain")
    log_a = _log_weights(beta, gamma, N)
    k = np.arange(N, dtype=float)
    return float(np.exp(logsumexp(log_a + np.log1p(k)) - logsumexp(log_a))) / N


def quasi_stationary_distribution(beta: float, gamma: float, N: int) -> ProbabilityVector:
    """Normalized detailed-balance distribution on the non-extinct states.

    Mass sits on k = 1..N with weight A_{k-1}; state 0 carries none.  Its
    mean prevalence coincides with ``ss_exact`` (two routes through the
    same weight sequence).
    """
    _check_rates(beta, gamma, N)
    log_a = _log_weights(beta, gamma, N)
    weights = np.exp(log_a - log_a.max())
    p = np.zeros(N + 1)
    p[1:] = weights / weights.sum()
    return ProbabilityVector(p=p, t=0.0)


@dataclass(frozen=True)
class SteadyStateReport:
    """Steady-state prevalences for one system size.

    Errors against the exact reference are recomputed properties, never
    stored, so they cannot drift out of sync with the values.
    """

    n_value: int
    exact: float
    pair: float
    triple: float
    binomial: float

    @property
    def err_pair(self) -> float:
        return abs(self.pair - self.exact)

    @property
    def err_triple(self) -> float:
        return abs(self.triple - self.exact)

    @property
    def err_binomial(self) -> float:
        return abs(self.binomial - self.exact)

    @property
    def scaled_errors(self) -> tuple[float, float, float]:
        """Errors multiplied by 1000, the conventional presentation scale."""
        return (1e3 * self.err_pair, 1e3 * self.err_triple, 1e3 * self.err_binomial)


def build_report(beta: float, gamma: float, N: int) -> SteadyStateReport:
    """All four steady-state prevalences and their discrepancies at one N."""
    return SteadyStateReport(
        n_value=N,
        exact=ss_exact(beta, gamma, N),
        pair=ss_pair(beta, gamma),
        triple=ss_triple(beta, gamma, N),
        binomial=ss_binomial(beta, gamma, N),
    )
