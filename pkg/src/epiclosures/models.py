"""Right-hand sides for the exact master equation and the reduced models.

Every builder returns a pure closure ``f(state) -> d(state)/dt`` over
immutable parameters, consumable by the integrator.  The reduced models and
their state vectors:

* mean field (pair closure):        [I]                1 equation
* pairwise with triple closure:     [I, SI, II, SS]    4 equations, counts
* moment models (one per closure):  [m1, m2]           2 equations, densities

The moment equations read

    dm1 = (beta - gamma) m1 - beta m2
    dm2 = 2 (beta - gamma) m2 - 2 beta m3 + ((beta + gamma) m1 - beta m2)/N

with m3 supplied by the chosen closure.  They are exact until the closure
is substituted; with the classic closure they are a change of variables of
the pairwise triple-closed system, so the two integrate to identical
prevalence curves from consistent initial data.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import ParameterError
from .generator import (
    ProbabilityVector,
    RateCoefficients,
    SisCompleteParams,
    apply_generator,
    build_sis_complete,
)
from .moments import (
    binomial_third_moment,
    classic_third_moment,
    classic_triple_closure,
    simplified_binomial_third_moment,
)


class ModelKind(Enum):
    """The exact chain and the five reduced models."""

    EXACT = "exact"
    MEAN_FIELD_PAIR = "pair"
    PAIRWISE_TRIPLE = "triple"
    MOMENT_CLASSIC = "moment_classic"
    MOMENT_BINOMIAL = "binomial"
    MOMENT_BINOMIAL_SIMPLIFIED = "binomial_simplified"


class MomentClosure(Enum):
    """Closure used for the third moment in the two-moment system."""

    CLASSIC = "classic"
    BINOMIAL = "binomial"
    SIMPLIFIED_BINOMIAL = "simplified_binomial"


#: Models governed by ODEs in a handful of expected quantities.
REDUCED_KINDS = (
    ModelKind.MEAN_FIELD_PAIR,
    ModelKind.PAIRWISE_TRIPLE,
    ModelKind.MOMENT_CLASSIC,
    ModelKind.MOMENT_BINOMIAL,
    ModelKind.MOMENT_BINOMIAL_SIMPLIFIED,
)

_KIND_TO_CLOSURE = {
    ModelKind.MOMENT_CLASSIC: MomentClosure.CLASSIC,
    ModelKind.MOMENT_BINOMIAL: MomentClosure.BINOMIAL,
    ModelKind.MOMENT_BINOMIAL_SIMPLIFIED: MomentClosure.SIMPLIFIED_BINOMIAL,
}


def rhs_exact(coeffs: RateCoefficients):
    """Master-equation right-hand side dp = generator(p)."""

    def rhs(p: np.ndarray) -> np.ndarray:
        return apply_generator(coeffs, p)

    return rhs


def rhs_mean_field(beta: float, gamma: float, N: int):
    """Mean-field SIS: dI = (beta/N) I (N - I) - gamma I, state [I]."""
    tau = beta / N

    def rhs(y: np.ndarray) -> np.ndarray:
        infected = y[0]
        return np.array([tau * infected * (N - infected) - gamma * infected])

    return rhs


def rhs_pairwise_triple(beta: float, gamma: float, N: int):
    """Pairwise SIS with the classic triple closure, state [I, SI, II, SS].

        dI  = tau SI - gamma I
        dSI = gamma (II - SI) + tau (SSI - ISI - SI)
        dII = -2 gamma II + 2 tau (ISI + SI)
        dSS = 2 gamma SI - 2 tau SSI

    with tau = beta/N and the triples closed through the susceptible/infected
    middle node: SSI = (N-2)/(N-1) SS*SI/S and ISI = (N-2)/(N-1) SI^2/S
    where S = N - I.  The closed terms cancel in d(SS + 2 SI + II)/dt, so
    the total ordered-pair count is conserved along trajectories.
    """
    tau = beta / N

    def rhs(y: np.ndarray) -> np.ndarray:
        infected, si, ii, ss = y
        s = N - infected
        ssi = classic_triple_closure(ss, si, s, N)
        isi = classic_triple_closure(si, si, s, N)
        return np.array([
            tau * si - gamma * infected,
            gamma * (ii - si) + tau * (ssi - isi - si),
            -2.0 * gamma * ii + 2.0 * tau * (isi + si),
            2.0 * gamma * si - 2.0 * tau * ssi,
        ])

    return rhs


def rhs_moment(beta_eff: float, gamma: float, N: int, closure: MomentClosure):
    """Two-moment system closed at the third moment, state [m1, m2].

    ``beta_eff`` is the aggregate infection pressure: beta on the complete
    graph, tau*n for the homogeneous-degree chain in its density-scaled
    form (the equations are otherwise identical).
    """
    if closure is MomentClosure.CLASSIC:
        def third(m1, m2):
            return classic_third_moment(m1, m2, N)
    elif closure is MomentClosure.BINOMIAL:
        def third(m1, m2):
            return binomial_third_moment(m1, m2, N)
    elif closure is MomentClosure.SIMPLIFIED_BINOMIAL:
        def third(m1, m2):
            return simplified_binomial_third_moment(m1, m2)
    else:
        raise ParameterError(f"unknown closure {closure!r}")

    excess = beta_eff - gamma

    def rhs(y: np.ndarray) -> np.ndarray:
        m1, m2 = y
        m3 = third(m1, m2)
        return np.array([
            excess * m1 - beta_eff * m2,
            2.0 * excess * m2 - 2.0 * beta_eff * m3
            + ((beta_eff + gamma) * m1 - beta_eff * m2) / N,
        ])

    return rhs


def build_rhs(kind: ModelKind, beta: float, gamma: float, N: int,
              coeffs: RateCoefficients | None = None):
    """RHS builder for any model kind with one uniform signature.

    ``coeffs`` overrides the rate family for the exact model (defaults to
    the complete-graph SIS coefficients); reduced models ignore it.
    """
    if kind is ModelKind.EXACT:
        if coeffs is None:
            coeffs = build_sis_complete(SisCompleteParams(N=N, beta=beta, gamma=gamma))
        return rhs_exact(coeffs)
    if kind is ModelKind.MEAN_FIELD_PAIR:
        return rhs_mean_field(beta, gamma, N)
    if kind is ModelKind.PAIRWISE_TRIPLE:
        return rhs_pairwise_triple(beta, gamma, N)
    return rhs_moment(beta, gamma, N, _KIND_TO_CLOSURE[kind])


def default_k0(N: int) -> int:
    """Default initial infected count: 5% of the population, at least 1."""
    return max(1, int(0.05 * N + 0.5))


def point_mass(N: int, k0: int) -> ProbabilityVector:
    """Distribution concentrated on the state with k0 infected."""
    if not 0 <= k0 <= N:
        raise ParameterError(f"k0 must lie in [0, N], got k0={k0}, N={N}")
    p = np.zeros(N + 1)
    p[k0] = 1.0
    return ProbabilityVector(p=p, t=0.0)


def initial_state(kind: ModelKind, N: int, k0: int) -> np.ndarray:
    """Initial data consistent with a point mass of k0 infected nodes.

    All models start from the same underlying distribution so that
    trajectory differences measure closure error rather than initialization
    mismatch: the exact chain starts at the point mass itself, reduced
    models at its exact moments and pair counts.
    """
    if not 0 <= k0 <= N:
        raise ParameterError(f"k0 must lie in [0, N], got k0={k0}, N={N}")
    if kind is ModelKind.EXACT:
        return point_mass(N, k0).p.copy()
    if kind is ModelKind.MEAN_FIELD_PAIR:
        return np.array([float(k0)])
    if kind is ModelKind.PAIRWISE_TRIPLE:
        return np.array([
            float(k0),
            float(k0) * (N - k0),
            float(k0) * (k0 - 1),
            float(N - k0) * (N - k0 - 1),
        ])
    fraction = k0 / N
    return np.array([fraction, fraction * fraction])


def prevalence_series(kind: ModelKind, states: np.ndarray, N: int) -> np.ndarray:
    """Map trajectory states to the prevalence I/N, rows = time samples."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    if kind is ModelKind.EXACT:
        k = np.arange(states.shape[1], dtype=float)
        return states @ k / N
    if kind in (ModelKind.MEAN_FIELD_PAIR, ModelKind.PAIRWISE_TRIPLE):
        return states[:, 0] / N
    return states[:, 0]
