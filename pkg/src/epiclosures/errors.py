"""Exception and warning types shared across the package."""


class ParameterError(ValueError):
    """Invalid model or configuration parameters."""


class IntegrationError(RuntimeError):
    """Time integration failed or was abandoned."""


class StepBudgetError(IntegrationError):
    """The integrator exhausted its step budget before reaching the end time."""


class NonFiniteDerivativeError(IntegrationError):
    """A right-hand side produced a NaN or infinity.

    Carries the time and the index of the first offending component.
    """

    def __init__(self, time: float, component: int):
        self.time = time
        self.component = component
        super().__init__(
            f"non-finite derivative at t={time:.6g} in component {component}"
        )


class DegenerateMomentsError(ValueError):
    """Moment values admit no valid distribution fit (zero variance, zero mean)."""


class DegenerateStateWarning(RuntimeWarning):
    """A closure or translation was evaluated at a degenerate state.

    Emitted instead of silently producing NaN when a denominator vanishes
    (all-susceptible or all-infected populations); the function returns the
    documented fallback value.
    """


class BelowThresholdWarning(UserWarning):
    """A steady-state formula was queried below its endemic threshold.

    The disease-free value 0 is returned in that case.
    """
