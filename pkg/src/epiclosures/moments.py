"""Moments, pair/triple count translations, and the closure relations.

On the complete graph the expected counts of singles, ordered pairs and
ordered triples are polynomial averages of the number of infected nodes k,
so they translate exactly into the density moments

    m_j = sum_k (k/N)^j p_k            (prevalence-fraction moments)

and back.  This module implements those translations plus the four closure
relations that make the reduced ODE systems self-contained:

* pair closure:                m2 = m1^2
* classic triple closure:      [ABC] ~ (N-2)/(N-1) [AB][BC]/[B], which at
  the moment level pins the third moment to the first two
* binomial closure:            fit a binomial distribution to the first two
  raw moments and read off its third
* simplified binomial closure: the same relation with the 1/N^2 terms dropped

Degenerate states (no susceptibles, no infecteds, zero variance) are legal
limits of every trajectory; functions flag them with DegenerateStateWarning
and return a documented fallback instead of dividing by zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMomentsError, DegenerateStateWarning, ParameterError
from .generator import ProbabilityVector

#: Denominators at or below this magnitude are treated as degenerate.
EPS_DEGENERATE = 1e-12


def _values(p) -> np.ndarray:
    if isinstance(p, ProbabilityVector):
        return p.clamped
    return np.asarray(p, dtype=float)


def density_moment(p, j: int) -> float:
    """j-th moment of the prevalence fraction: sum_k (k/N)^j p_k."""
    if j < 1:
        raise ParameterError(f"moment order must be >= 1, got {j}")
    values = _values(p)
    N = values.shape[0] - 1
    k = np.arange(N + 1, dtype=float)
    return float(np.dot((k / N) ** j, values))


def raw_moment(p, j: int) -> float:
    """j-th raw moment of the infected count: sum_k k^j p_k."""
    if j < 1:
        raise ParameterError(f"moment order must be >= 1, got {j}")
    values = _values(p)
    k = np.arange(values.shape[0], dtype=float)
    return float(np.dot(k**j, values))


@dataclass(frozen=True)
class MomentState:
    """First two density moments (m1, m2) of the prevalence fraction.

    Validity requires 0 <= m1 <= 1 and m1^2 <= m2 <= m1 (Cauchy-Schwarz plus
    k/N <= 1).  Violations are reported through ``issues``, never silently
    repaired: integrators may step slightly outside the region and the
    caller decides what that means.
    """

    m1: float
    m2: float
    N: int

    def raw(self, j: int) -> float:
        """Raw moment N^j m_j for j in {1, 2}."""
        if j == 1:
            return self.N * self.m1
        if j == 2:
            return self.N**2 * self.m2
        raise ParameterError(f"only the first two moments are stored, got j={j}")

    def issues(self, tol: float = 1e-12) -> tuple[str, ...]:
        found = []
        if not -tol <= self.m1 <= 1.0 + tol:
            found.append(f"m1={self.m1!r} outside [0, 1]")
        if self.m2 > self.m1 + tol:
            found.append(f"m2={self.m2!r} exceeds m1={self.m1!r}")
        if self.m2 < self.m1**2 - tol:
            found.append(f"m2={self.m2!r} below m1^2={self.m1 ** 2!r}")
        return tuple(found)

    @property
    def is_valid(self) -> bool:
        return not self.issues()


@dataclass(frozen=True)
class PairwiseState:
    """Expected counts of infected singles and ordered pairs."""

    I: float
    SI: float
    II: float
    SS: float

    def conservation_residual(self, N: int) -> float:
        """Deviation of SS + 2 SI + II from the total ordered-pair count N(N-1)."""
        return self.SS + 2.0 * self.SI + self.II - N * (N - 1.0)

    def issues(self, N: int) -> tuple[str, ...]:
        found = []
        if not 0.0 <= self.I <= N:
            found.append(f"I={self.I!r} outside [0, N]")
        residual = self.conservation_residual(N)
        if abs(residual) > 1e-8 * N * N:
            found.append(f"pair conservation violated by {residual!r}")
        return tuple(found)


@dataclass(frozen=True)
class ExpectedCounts:
    """Expected single, ordered-pair and ordered-triple counts."""

    I: float
    S: float
    SI: float
    II: float
    SS: float
    SSI: float
    ISI: float


def counts_from_moments(m1: float, m2: float, m3: float, N: int) -> ExpectedCounts:
    """Translate density moments into expected counts on the complete graph.

    Exact identities (no approximation):

        I   = N m1                      S   = N (1 - m1)
        SI  = N^2 (m1 - m2)             II  = N^2 (m2 - m1/N)
        SS  = N^2 (1 - 1/N + (1/N - 2) m1 + m2)
        SSI = N^3 ((1 - 1/N) m1 + (1/N - 2) m2 + m3)
        ISI = N^3 (-m1/N + (1/N + 1) m2 - m3)
    """
    n2 = float(N) ** 2
    n3 = float(N) ** 3
    inv = 1.0 / N
    return ExpectedCounts(
        I=N * m1,
        S=N * (1.0 - m1),
        SI=n2 * (m1 - m2),
        II=n2 * (m2 - inv * m1),
        SS=n2 * (1.0 - inv + (inv - 2.0) * m1 + m2),
        SSI=n3 * ((1.0 - inv) * m1 + (inv - 2.0) * m2 + m3),
        ISI=n3 * (-inv * m1 + (inv + 1.0) * m2 - m3),
    )


def counts_from_distribution(p) -> ExpectedCounts:
    """Expected counts averaged directly over the distribution.

    Uses the combinatorial tallies for a complete graph with k infected
    nodes: k(N-k) ordered SI pairs, k(k-1) ordered II pairs, and so on.
    Serves as the independent cross-check for ``counts_from_moments``.
    """
    values = _values(p)
    N = values.shape[0] - 1
    k = np.arange(N + 1, dtype=float)
    s = N - k
    return ExpectedCounts(
        I=float(np.dot(k, values)),
        S=float(np.dot(s, values)),
        SI=float(np.dot(k * s, values)),
        II=float(np.dot(k * (k - 1.0), values)),
        SS=float(np.dot(s * (s - 1.0), values)),
        SSI=float(np.dot(s * (s - 1.0) * k, values)),
        ISI=float(np.dot(k * (k - 1.0) * s, values)),
    )


def classic_triple_closure(ab: float, bc: float, b: float, N: int) -> float:
    """Close an ordered triple count: [ABC] = (N-2)/(N-1) [AB][BC]/[B].

    Returns 0 with a DegenerateStateWarning when the middle class is
    (numerically) empty, since no triples can be centered on it.
    """
    if b <= EPS_DEGENERATE:
        warnings.warn(
            "triple closure evaluated with empty middle class, returning 0",
            DegenerateStateWarning, stacklevel=2,
        )
        return 0.0
    return (N - 2.0) / (N - 1.0) * ab * bc / b


def classic_third_moment(m1: float, m2: float, N: int) -> float:
    """Third density moment implied by the classic triple closure.

        m3 = -m1/N + (1 + 1/N) m2 - (N-2)/(N-1) (m1 - m2)^2 / (1 - m1)

    Closing either susceptible-centered or infected-centered triples yields
    this same relation.  The all-infected state m1 = 1 is flagged and mapped
    to the consistent point-mass value 1.
    """
    if 1.0 - m1 <= EPS_DEGENERATE:
        warnings.warn(
            "classic closure evaluated at the all-infected state",
            DegenerateStateWarning, stacklevel=2,
        )
        return 1.0
    inv = 1.0 / N
    correction = (N - 2.0) / (N - 1.0) * (m1 - m2) ** 2 / (1.0 - m1)
    return -inv * m1 + (1.0 + inv) * m2 - correction


def pair_second_moment(m1: float) -> float:
    """Second moment under the pair closure: independence gives m2 = m1^2."""
    return m1 * m1


@dataclass(frozen=True)
class BinomialFit:
    """Binomial size/probability parameters recovered from two raw moments.

    ``n`` is real valued; matching two moments does not require an integer
    size.  The fit is valid when p lies in [0, 1] and n is positive.
    """

    n: float
    p: float

    @property
    def is_valid(self) -> bool:
        return self.n > 0.0 and 0.0 <= self.p <= 1.0


def binomial_fit(mean: float, second_moment: float) -> BinomialFit:
    """Invert the first two binomial raw moments for (n, p).

    From mean = np and second_moment = np + n(n-1)p^2:

        p = 1 + mean - second_moment/mean
        n = mean^2 / (mean + mean^2 - second_moment)

    Raises DegenerateMomentsError when the mean is nonpositive or the
    variance is degenerate (denominator ~ 0, e.g. second_moment = mean^2
    plus mean exactly), since no binomial matches such moments.
    """
    if mean <= 0.0:
        raise DegenerateMomentsError(f"mean must be positive, got {mean!r}")
    denominator = mean + mean * mean - second_moment
    if abs(denominator) <= EPS_DEGENERATE * max(1.0, mean * mean):
        raise DegenerateMomentsError(
            "degenerate variance: moments admit no binomial fit"
        )
    return BinomialFit(n=mean * mean / denominator, p=1.0 + mean - second_moment / mean)


def binomial_third_raw_moment(mean: float, second_moment: float) -> float:
    """Third raw moment of the binomial matching the first two raw moments.

        M3 = 2 M2^2/M1 - M2 - M1 (M2 - M1)

    Exact whenever (M1, M2) really are binomial moments.  The disease-free
    state M1 = 0 has all raw moments zero; it is flagged and mapped to 0.
    """
    if mean <= EPS_DEGENERATE:
        warnings.warn(
            "binomial closure evaluated at the disease-free state, returning 0",
            DegenerateStateWarning, stacklevel=2,
        )
        return 0.0
    return 2.0 * second_moment**2 / mean - second_moment - mean * (second_moment - mean)


def binomial_third_moment(m1: float, m2: float, N: int) -> float:
    """Density-scaled twin of ``binomial_third_raw_moment``.

        m3 = 2 m2^2/m1 - m1 m2 + (m1^2 - m2)/N
    """
    if m1 <= EPS_DEGENERATE:
        warnings.warn(
            "binomial closure evaluated at the disease-free state, returning 0",
            DegenerateStateWarning, stacklevel=2,
        )
        return 0.0
    return 2.0 * m2 * m2 / m1 - m1 * m2 + (m1 * m1 - m2) / N


def simplified_binomial_third_moment(m1: float, m2: float) -> float:
    """Binomial closure with the order-1/N^2 terms dropped: 3 m1 m2 - 2 m1^3."""
    return 3.0 * m1 * m2 - 2.0 * m1**3


def limiting_pair_second_moment(m1: float, N: int) -> float:
    """Second moment from a binomial fit with size pinned to N.

    Setting n = N (so p = m1) in the binomial moment formulas gives

        m2 = m1/N + (1 - 1/N) m1^2,

    an alternative pair-level closure that recovers m2 = m1^2 as N grows.
    """
    return m1 / N + (1.0 - 1.0 / N) * m1 * m1
