"""Experiment drivers: prevalence time series, steady-state error scans,
log-log slope fits, and CSV/JSON export.

Output schemas (columns in order):

* time series: ``t`` followed by one column per selected model, drawn from
  ``exact, pair, triple, moment_classic, binomial, binomial_simplified``
* error scan:  ``N, exact, pair, triple, binomial, err_pair, err_triple,
  err_binomial, err_pair_x1000, err_triple_x1000, err_binomial_x1000``

All numeric output is written with 10 significant digits in C locale
formatting, so identical inputs produce byte-identical files.  Writes go
through a temporary file in the destination directory followed by an
atomic rename.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .generator import RateCoefficients
from .integrator import IntegratorConfig, integrate, integrate_to_steady
from .models import (
    ModelKind,
    build_rhs,
    default_k0,
    initial_state,
    prevalence_series,
)
from .steady_state import SteadyStateReport, build_report, ss_binomial, ss_pair, ss_triple

#: Canonical column order for time-series output.
MODEL_ORDER = (
    ModelKind.EXACT,
    ModelKind.MEAN_FIELD_PAIR,
    ModelKind.PAIRWISE_TRIPLE,
    ModelKind.MOMENT_CLASSIC,
    ModelKind.MOMENT_BINOMIAL,
    ModelKind.MOMENT_BINOMIAL_SIMPLIFIED,
)

_CLOSURE_COLUMNS = ("pair", "triple", "binomial")

_SCAN_HEADER = (
    "N", "exact", "pair", "triple", "binomial",
    "err_pair", "err_triple", "err_binomial",
    "err_pair_x1000", "err_triple_x1000", "err_binomial_x1000",
)


def _fmt(value: float) -> str:
    return format(float(value), ".10g")


@dataclass(frozen=True)
class TimeSeriesResult:
    """Prevalence curves I/N on a shared time grid, plus the parameter echo."""

    times: np.ndarray
    curves: dict[str, np.ndarray]
    beta: float
    gamma: float
    N: int
    k0: int
    t_end: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        curves = {name: np.asarray(curve, dtype=float) for name, curve in self.curves.items()}
        for name, curve in curves.items():
            if curve.shape != times.shape:
                raise ParameterError(f"curve {name!r} does not match the time grid")
            if curve.min() < -1e-9 or curve.max() > 1.0 + 1e-9:
                raise ParameterError(f"curve {name!r} leaves [0, 1]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "curves", curves)

    def to_dict(self) -> dict:
        return {
            "kind": "timeseries",
            "beta": self.beta,
            "gamma": self.gamma,
            "N": self.N,
            "k0": self.k0,
            "t_end": self.t_end,
            "times": self.times.tolist(),
            "curves": {name: curve.tolist() for name, curve in self.curves.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimeSeriesResult":
        return cls(
            times=np.asarray(data["times"], dtype=float),
            curves={k: np.asarray(v, dtype=float) for k, v in data["curves"].items()},
            beta=data["beta"], gamma=data["gamma"], N=data["N"],
            k0=data["k0"], t_end=data["t_end"],
        )


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares slope of log(error) against log(N), with its standard error."""

    slope: float
    stderr: float
    n_points: int


@dataclass(frozen=True)
class ErrorScanResult:
    """Per-N steady-state reports plus fitted convergence orders."""

    beta: float
    gamma: float
    n_values: tuple[int, ...]
    reports: tuple[SteadyStateReport, ...]
    slopes: dict[str, SlopeFit | None]
    fit_window: dict[str, tuple[int, ...]]
    notes: tuple[str, ...] = ()
    verification: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "error_scan",
            "beta": self.beta,
            "gamma": self.gamma,
            "n_values": list(self.n_values),
            "reports": [
                {
                    "N": r.n_value,
                    "exact": r.exact,
                    "pair": r.pair,
                    "triple": r.triple,
                    "binomial": r.binomial,
                }
                for r in self.reports
            ],
            "slopes": {
                name: None if fit is None else
                {"slope": fit.slope, "stderr": fit.stderr, "n_points": fit.n_points}
                for name, fit in self.slopes.items()
            },
            "fit_window": {name: list(ns) for name, ns in self.fit_window.items()},
            "notes": list(self.notes),
            "verification": dict(self.verification),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ErrorScanResult":
        return cls(
            beta=data["beta"],
            gamma=data["gamma"],
            n_values=tuple(data["n_values"]),
            reports=tuple(
                SteadyStateReport(
                    n_value=r["N"], exact=r["exact"], pair=r["pair"],
                    triple=r["triple"], binomial=r["binomial"],
                )
                for r in data["reports"]
            ),
            slopes={
                name: None if fit is None else
                SlopeFit(slope=fit["slope"], stderr=fit["stderr"], n_points=fit["n_points"])
                for name, fit in data["slopes"].items()
            },
            fit_window={name: tuple(ns) for name, ns in data["fit_window"].items()},
            notes=tuple(data["notes"]),
            verification=dict(data.get("verification", {})),
        )


def run_timeseries(beta: float, gamma: float, N: int, k0: int | None = None,
                   models=MODEL_ORDER, t_end: float = 15.0, n_points: int = 301,
                   config: IntegratorConfig | None = None,
                   coeffs: RateCoefficients | None = None) -> TimeSeriesResult:
    """Integrate the selected models from consistent initial data.

    Every model starts from the same point mass of ``k0`` infected (default
    5% of N, at least 1): the exact chain from the distribution itself,
    reduced models from its moments and pair counts.  ``coeffs`` overrides
    the rate family of the exact chain; reduced models always use the
    density-scaled parameters (beta, gamma).
    """
    if t_end <= 0:
        raise ParameterError(f"t_end must be positive, got {t_end}")
    if n_points < 2:
        raise ParameterError(f"need at least 2 output points, got {n_points}")
    if k0 is None:
        k0 = default_k0(N)
    config = config or IntegratorConfig()
    times = np.linspace(0.0, t_end, n_points)

    curves: dict[str, np.ndarray] = {}
    for kind in MODEL_ORDER:
        if kind not in models:
            continue
        rhs = build_rhs(kind, beta, gamma, N, coeffs=coeffs)
        y0 = initial_state(kind, N, k0)
        trajectory = integrate(rhs, y0, (0.0, t_end), output_times=times, config=config)
        curves[kind.value] = prevalence_series(kind, trajectory.states, N)

    return TimeSeriesResult(times=times, curves=curves, beta=beta, gamma=gamma,
                            N=N, k0=k0, t_end=t_end)


def fit_loglog_slope(n_values, errors) -> SlopeFit:
    """Least-squares fit of log(error) = slope * log(N) + intercept.

    Requires at least three strictly positive errors; the standard error is
    the usual regression estimate (zero when the fit is exact or has no
    spare degrees of freedom).
    """
    n_values = np.asarray(n_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if n_values.shape != errors.shape or n_values.ndim != 1:
        raise ParameterError("n_values and errors must be matching 1-d sequences")
    if n_values.size < 3:
        raise ParameterError("slope fit needs at least 3 points")
    if np.any(errors <= 0.0):
        raise ParameterError("slope fit needs strictly positive errors")
    x = np.log(n_values)
    y = np.log(errors)
    x_centered = x - x.mean()
    sxx = float(np.dot(x_centered, x_centered))
    slope = float(np.dot(x_centered, y) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (slope * x + intercept)
    dof = x.size - 2
    variance = float(np.dot(residuals, residuals) / dof) if dof > 0 else 0.0
    return SlopeFit(slope=slope, stderr=math.sqrt(variance / sxx), n_points=x.size)


def _verify_fixed_points(beta: float, gamma: float, n_values, notes: list[str]) -> dict[str, float]:
    """Integrate each reduced model to its plateau and compare with the formulas."""
    targets = {
        ModelKind.MEAN_FIELD_PAIR: lambda n: ss_pair(beta, gamma),
        ModelKind.PAIRWISE_TRIPLE: lambda n: ss_triple(beta, gamma, n),
        ModelKind.MOMENT_BINOMIAL: lambda n: ss_binomial(beta, gamma, n),
    }
    # The plateau threshold scales with the state max-norm (counts of order
    # N^2 for the pairwise model), so the integrator tolerances must keep
    # the error floor of the derivative well below it.
    config = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12)
    residuals: dict[str, float] = {}
    for N in n_values:
        for kind, analytic in targets.items():
            rhs = build_rhs(kind, beta, gamma, N)
            y0 = initial_state(kind, N, default_k0(N))
            result = integrate_to_steady(rhs, y0, config=config,
                                         plateau_tol=1e-10, t_max=4000.0)
            dynamic = float(prevalence_series(kind, result.state[np.newaxis, :], N)[0])
            residual = abs(dynamic - analytic(N))
            residuals[f"{kind.value}@N={N}"] = residual
            if not result.converged:
                notes.append(f"fixed-point check did not plateau: {kind.value} at N={N}")
            if residual > 1e-7:
                notes.append(
                    f"fixed-point mismatch {residual:.3e} for {kind.value} at N={N}"
                )
    return residuals


def run_error_scan(beta: float, gamma: float, n_values,
                   verify_dynamics: bool = False) -> ErrorScanResult:
    """Closed-form steady-state errors per N plus log-log slope fits.

    Purely algebraic (no integration) unless ``verify_dynamics`` is set, in
    which case the reduced models are also integrated to steady state at
    N in {100, 400} (intersected with the scan) and the dynamic/analytic
    residuals are attached to the result.
    """
    notes: list[str] = []
    cleaned: list[int] = []
    for raw in n_values:
        value = int(raw)
        if value < 2:
            raise ParameterError(f"every N must be >= 2, got {value}")
        if value in cleaned:
            notes.append(f"duplicate N={value} dropped")
            continue
        cleaned.append(value)
    if not cleaned:
        raise ParameterError("no system sizes supplied")

    reports = tuple(build_report(beta, gamma, N) for N in cleaned)

    for report in reports:
        if not report.pair >= report.triple >= report.exact:
            notes.append(
                f"steady-state ordering pair >= triple >= exact does not hold at "
                f"N={report.n_value}"
            )

    slopes: dict[str, SlopeFit | None] = {}
    fit_window: dict[str, tuple[int, ...]] = {}
    for name in _CLOSURE_COLUMNS:
        pairs = [
            (r.n_value, getattr(r, f"err_{name}"))
            for r in reports if getattr(r, f"err_{name}") > 0.0
        ]
        dropped = len(reports) - len(pairs)
        if dropped:
            notes.append(f"{name}: {dropped} zero-error point(s) excluded from the fit")
        fit_window[name] = tuple(n for n, _ in pairs)
        if len(pairs) < 3:
            slopes[name] = None
            notes.append(f"{name}: fewer than 3 usable points, no slope fitted")
        else:
            slopes[name] = fit_loglog_slope([n for n, _ in pairs], [e for _, e in pairs])

    verification: dict[str, float] = {}
    if verify_dynamics:
        spot = [N for N in (100, 400) if N in cleaned]
        if spot:
            verification = _verify_fixed_points(beta, gamma, spot, notes)

    return ErrorScanResult(
        beta=beta, gamma=gamma, n_values=tuple(cleaned), reports=reports,
        slopes=slopes, fit_window=fit_window, notes=tuple(notes),
        verification=verification,
    )


def _timeseries_csv(result: TimeSeriesResult) -> str:
    names = [kind.value for kind in MODEL_ORDER if kind.value in result.curves]
    lines = [",".join(["t"] + names)]
    for i, t in enumerate(result.times):
        row = [_fmt(t)] + [_fmt(result.curves[name][i]) for name in names]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _scan_csv(result: ErrorScanResult) -> str:
    lines = [",".join(_SCAN_HEADER)]
    for r in result.reports:
        scaled = r.scaled_errors
        row = [
            str(r.n_value), _fmt(r.exact), _fmt(r.pair), _fmt(r.triple), _fmt(r.binomial),
            _fmt(r.err_pair), _fmt(r.err_triple), _fmt(r.err_binomial),
            _fmt(scaled[0]), _fmt(scaled[1]), _fmt(scaled[2]),
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def export(result, format: str, path) -> None:
    """Write a result to ``path`` as CSV or JSON, atomically.

    The file appears either complete or not at all: content goes to a
    temporary sibling first and is moved into place with os.replace.
    """
    fmt = format.lower()
    if fmt == "csv":
        if isinstance(result, TimeSeriesResult):
            payload = _timeseries_csv(result)
        elif isinstance(result, ErrorScanResult):
            payload = _scan_csv(result)
        else:
            raise ParameterError(f"cannot export {type(result).__name__} as CSV")
    elif fmt == "json":
        payload = json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"
    else:
        raise ParameterError(f"unknown export format {format!r}")

    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    try:
        fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as handle:
                handle.write(payload)
            os.replace(tmp_path, path)
        except BaseException:
            os.unlink(tmp_path)
            raise
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc
