"""Transition-rate families and the tridiagonal master-equation generator.

All supported processes are continuous-time birth-death chains on the states
k = 0..N: from state k the chain moves up at rate a[k] and down at rate c[k].
The probability vector p(t) then evolves as

    dp_k/dt = a[k-1] p[k-1] - (a[k] + c[k]) p[k] + c[k+1] p[k+1],

with the out-of-range conventions a[-1] = c[N+1] = 0.  Three coefficient
families are provided:

* complete-graph SIS:      a[k] = (beta/N) k (N-k),        c[k] = gamma k
* homogeneous-degree SIS:  a[k] = tau n k (N-k) / (N-1),   c[k] = gamma k
  (or denominator N in the modified variant, which makes the chain
  coincide with the complete-graph one under beta = tau n)
* capped link turnover:    a[k] = alpha (N-k) (1 - k/kmax), c[k] = omega k
  (random link activation-deletion with a global carrying capacity)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError

#: Tolerance below zero allowed for probabilities produced by explicit
#: integrators; values in (-EPS_PROBABILITY, 0) are clamped to 0 on read-out.
EPS_PROBABILITY = 1e-10

#: Tolerance on the total probability mass of a ProbabilityVector.
EPS_MASS = 1e-10


class HomogeneousVariant(Enum):
    """Denominator convention for the homogeneous-degree infection rates."""

    ORIGINAL = "original"  # a[k] = tau n k (N-k) / (N-1)
    MODIFIED = "modified"  # a[k] = tau n k (N-k) / N


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def _require_int(value, name: str) -> None:
    _require(isinstance(value, (int, np.integer)) and not isinstance(value, bool),
             f"{name} must be an integer, got {value!r}")


@dataclass(frozen=True)
class SisCompleteParams:
    """SIS epidemic on a complete graph with N nodes.

    beta is the aggregate transmission rate; the per-link rate is the
    derived quantity tau = beta / N.
    """

    N: int
    beta: float
    gamma: float

    def __post_init__(self):
        _require_int(self.N, "N")
        _require(self.N >= 2, f"N must be >= 2, got {self.N}")
        _require(self.beta > 0, f"beta must be positive, got {self.beta}")
        _require(self.gamma > 0, f"gamma must be positive, got {self.gamma}")

    @property
    def tau(self) -> float:
        """Per-link transmission rate beta / N."""
        return self.beta / self.N


@dataclass(frozen=True)
class SisHomogeneousParams:
    """SIS epidemic on a graph where every node has degree n < N."""

    N: int
    n: int
    tau: float
    gamma: float
    variant: HomogeneousVariant = HomogeneousVariant.ORIGINAL

    def __post_init__(self):
        _require_int(self.N, "N")
        _require_int(self.n, "n")
        _require(self.N >= 2, f"N must be >= 2, got {self.N}")
        _require(1 <= self.n < self.N,
                 f"degree n must satisfy 1 <= n < N, got n={self.n}, N={self.N}")
        _require(self.tau > 0, f"tau must be positive, got {self.tau}")
        _require(self.gamma > 0, f"gamma must be positive, got {self.gamma}")

    @property
    def delta(self) -> float:
        """Aggregate infection pressure tau * n (the beta analogue)."""
        return self.tau * self.n


@dataclass(frozen=True)
class RladParams:
    """Random link activation-deletion with a global carrying capacity.

    N counts the potential edges, k the currently active ones.  Non-active
    links activate at rate alpha each, scaled down by the remaining capacity
    (1 - k/k1max); active links are deleted at rate omega each.
    """

    N: int
    alpha: float
    omega: float
    k1max: int

    def __post_init__(self):
        _require_int(self.N, "N")
        _require_int(self.k1max, "k1max")
        _require(self.N >= 1, f"N must be >= 1, got {self.N}")
        _require(self.alpha > 0, f"alpha must be positive, got {self.alpha}")
        _require(self.omega > 0, f"omega must be positive, got {self.omega}")
        _require(self.k1max > 0, f"k1max must be positive, got {self.k1max}")


@dataclass(frozen=True)
class RateCoefficients:
    """Birth rates a[k] and death rates c[k] for one chain on 0..N.

    Invariants enforced at construction: a[N] = 0 and c[0] = 0 (no flow can
    leave the state space) and all entries nonnegative.  The arrays are
    frozen read-only so instances can be shared across threads.
    """

    a: np.ndarray
    c: np.ndarray
    N: int = field(default=-1)

    def __post_init__(self):
        a = np.ascontiguousarray(self.a, dtype=float)
        c = np.ascontiguousarray(self.c, dtype=float)
        n = a.shape[0] - 1
        if self.N == -1:
            object.__setattr__(self, "N", n)
        _require(a.ndim == 1 and c.ndim == 1 and a.shape == c.shape,
                 "a and c must be 1-d sequences of equal length")
        _require(self.N == n, f"N={self.N} does not match sequence length {n + 1}")
        _require(a[n] == 0.0, "a[N] must be 0: no births beyond the last state")
        _require(c[0] == 0.0, "c[0] must be 0: no deaths out of state 0")
        _require(bool(np.all(a >= 0.0)) and bool(np.all(c >= 0.0)),
                 "rates must be nonnegative")
        a.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class ProbabilityVector:
    """Distribution p[k] over the chain states 0..N at time t.

    Small negative entries down to -EPS_PROBABILITY are tolerated (explicit
    integrators produce them); the ``clamped`` view zeroes them.
    """

    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        p = np.ascontiguousarray(self.p, dtype=float)
        _require(p.ndim == 1 and p.size >= 1, "p must be a nonempty 1-d sequence")
        _require(self.t >= 0.0, f"time stamp must be >= 0, got {self.t}")
        _require(bool(np.all(p >= -EPS_PROBABILITY)),
                 f"probabilities must be >= -{EPS_PROBABILITY:g}")
        total = float(p.sum())
        _require(abs(total - 1.0) <= EPS_MASS,
                 f"probabilities must sum to 1 within {EPS_MASS:g}, got {total!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def N(self) -> int:
        return self.p.shape[0] - 1

    @property
    def clamped(self) -> np.ndarray:
        """Read-out copy with round-off negatives clamped to exactly 0."""
        out = self.p.copy()
        out[out < 0.0] = 0.0
        return out


def _infection_rates_density_scaled(delta: float, N: int) -> np.ndarray:
    # a[k] = (delta/N) k (N-k); same operation order for every family so
    # that chains with equal delta match entrywise exactly.
    k = np.arange(N + 1, dtype=float)
    return (delta / N) * k * (N - k)


def build_sis_complete(params: SisCompleteParams) -> RateCoefficients:
    """Rates a[k] = (beta/N) k (N-k), c[k] = gamma k on the complete graph."""
    k = np.arange(params.N + 1, dtype=float)
    a = _infection_rates_density_scaled(params.beta, params.N)
    c = params.gamma * k
    return RateCoefficients(a=a, c=c, N=params.N)


def build_sis_homogeneous(params: SisHomogeneousParams) -> RateCoefficients:
    """Rates for degree-n SIS: a[k] = tau n k (N-k) / (N-1), c[k] = gamma k.

    The MODIFIED variant divides by N instead of N-1, which makes the
    coefficients equal, entry by entry, to the complete-graph family with
    beta = tau * n.
    """
    N = params.N
    k = np.arange(N + 1, dtype=float)
    if params.variant is HomogeneousVariant.MODIFIED:
        a = _infection_rates_density_scaled(params.delta, N)
    else:
        a = params.tau * params.n * k * (N - k) / (N - 1)
    c = params.gamma * k
    return RateCoefficients(a=a, c=c, N=N)


def build_rlad(params: RladParams) -> RateCoefficients:
    """Rates a[k] = alpha (N-k) (1 - k/k1max), c[k] = omega k, clamped at 0.

    The raw activation rate goes negative for k > k1max; those entries are
    clamped to 0 so the generator stays a valid rate matrix, making states
    above the carrying capacity transient.
    """
    N = params.N
    k = np.arange(N + 1, dtype=float)
    a = params.alpha * (N - k) * (1.0 - k / params.k1max)
    np.maximum(a, 0.0, out=a)
    a[N] = 0.0
    c = params.omega * k
    return RateCoefficients(a=a, c=c, N=N)


def apply_generator(coeffs: RateCoefficients, p) -> np.ndarray:
    """Apply the tridiagonal generator: dp_k = a[k-1]p[k-1] - (a[k]+c[k])p[k] + c[k+1]p[k+1].

    ``p`` may be a ProbabilityVector or any length-(N+1) sequence; the
    out-of-range terms at k=0 and k=N are zero by the boundary conventions.
    Columns of the generator sum to zero, so sum(dp) vanishes up to round-off
    and total probability is conserved under integration.
    """
    if isinstance(p, ProbabilityVector):
        p = p.p
    p = np.asarray(p, dtype=float)
    if p.shape != coeffs.a.shape:
        raise ParameterError(
            f"state has length {p.shape[0] if p.ndim == 1 else p.shape}, "
            f"expected {coeffs.N + 1}"
        )
    a, c = coeffs.a, coeffs.c
    dp = -(a + c) * p
    dp[1:] += a[:-1] * p[:-1]
    dp[:-1] += c[1:] * p[1:]
    return dp
