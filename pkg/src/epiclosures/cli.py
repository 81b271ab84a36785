"""Command-line interface.

Four subcommands cover the library's experiments:

* ``timeseries``: integrate the exact chain and selected reduced models,
  write prevalence curves to CSV or JSON.
* ``scan``: closed-form steady-state errors across system sizes with
  log-log slope fits.
* ``steady``: the four steady-state prevalences at a single N.
* ``validate``: Gillespie-ensemble cross-check of the master equation.

Exit codes: 0 success, 1 runtime failure, 2 argument errors.  Every
command echoes its resolved parameters to standard error, and identical
invocations (including seeds) produce identical output files.
"""

from __future__ import annotations

import json
import sys
import warnings

import click
import numpy as np

from .errors import ParameterError
from .generator import (
    HomogeneousVariant,
    RladParams,
    SisCompleteParams,
    SisHomogeneousParams,
    build_rlad,
    build_sis_complete,
    build_sis_homogeneous,
)
from .harness import export, run_error_scan, run_timeseries
from .integrator import IntegratorConfig, integrate
from .models import ModelKind, build_rhs, default_k0, initial_state
from .ssa import SsaConfig, empirical_distribution, gillespie_run, total_variation
from .steady_state import build_report

_MODEL_TOKENS = {kind.value: kind for kind in ModelKind}


def _parse_int_list(_ctx, _param, value):
    if value is None:
        return None
    try:
        return tuple(int(item) for item in value.split(",") if item.strip())
    except ValueError:
        raise click.UsageError(f"expected a comma-separated list of integers, got {value!r}")


def _parse_float_list(_ctx, _param, value):
    if value is None:
        return None
    try:
        return tuple(float(item) for item in value.split(",") if item.strip())
    except ValueError:
        raise click.UsageError(f"expected a comma-separated list of numbers, got {value!r}")


def _apply_config(ctx: click.Context, config_path: str | None) -> None:
    """Fill parameters from a JSON config file; explicit flags win."""
    if not config_path:
        return
    try:
        with open(config_path) as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config {config_path}: {exc}")
    if not isinstance(data, dict):
        raise click.UsageError("config file must hold a JSON object")
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in ctx.params:
            raise click.UsageError(f"unknown config key {key!r}")
        source = ctx.get_parameter_source(name)
        if source is not None and source.name == "COMMANDLINE":
            continue
        param = next(p for p in ctx.command.params if p.name == name)
        ctx.params[name] = param.process_value(ctx, value)


def _require_options(params: dict, names: dict[str, str]) -> None:
    """Presence check deferred past the config merge for required options."""
    for key, flag in names.items():
        if params.get(key) is None:
            raise click.UsageError(f"Missing option '{flag}'.")


def _resolve_family(family, beta, tau, n_degree, gamma, variant,
                    alpha, omega, k1max, N):
    """Build the rate coefficients and the effective (beta, gamma) pair."""
    if family == "rlad":
        if alpha is None or omega is None or k1max is None:
            raise click.UsageError("rlad needs --alpha, --omega and --k1max")
        coeffs = build_rlad(RladParams(N=N, alpha=alpha, omega=omega, k1max=k1max))
        return coeffs, None, None
    if family == "homogeneous":
        if tau is None or n_degree is None or gamma is None:
            raise click.UsageError("homogeneous needs --tau, --n-degree and --gamma")
        params = SisHomogeneousParams(
            N=N, n=n_degree, tau=tau, gamma=gamma,
            variant=HomogeneousVariant(variant),
        )
        return build_sis_homogeneous(params), params.delta, gamma
    if beta is None or gamma is None:
        raise click.UsageError("complete graph needs --beta and --gamma")
    coeffs = build_sis_complete(SisCompleteParams(N=N, beta=beta, gamma=gamma))
    return coeffs, beta, gamma


def _effective_rates(beta, tau, n_degree, gamma):
    """Aggregate infection pressure for the closed-form commands."""
    if beta is not None and tau is not None:
        raise click.UsageError("give either --beta or --tau/--n-degree, not both")
    if beta is None:
        if tau is None or n_degree is None:
            raise click.UsageError("need --beta, or --tau together with --n-degree")
        beta = tau * n_degree
    if gamma is None:
        raise click.UsageError("missing --gamma")
    return beta, gamma


def _echo_params(**params) -> None:
    rendered = " ".join(f"{key}={value}" for key, value in params.items() if value is not None)
    click.echo(f"# {rendered}", err=True)


def _integrator_config(rel_tol, abs_tol):
    if rel_tol is None and abs_tol is None:
        return None
    base = IntegratorConfig()
    return IntegratorConfig(
        rel_tol=rel_tol if rel_tol is not None else base.rel_tol,
        abs_tol=abs_tol if abs_tol is not None else base.abs_tol,
    )


@click.group()
def main():
    """Master-equation SIS dynamics and moment-closure benchmarking."""


@main.command()
@click.option("--family", type=click.Choice(["complete", "homogeneous", "rlad"]),
              default="complete", show_default=True, help="Rate family for the exact chain.")
@click.option("--beta", type=float, default=None, help="Aggregate transmission rate (complete graph).")
@click.option("--tau", type=float, default=None, help="Per-link transmission rate (homogeneous).")
@click.option("--n-degree", type=int, default=None, help="Node degree n < N (homogeneous).")
@click.option("--variant", type=click.Choice(["modified", "original"]), default="modified",
              show_default=True,
              help="Homogeneous denominator: N (modified, matches the reduced models) or N-1.")
@click.option("--gamma", type=float, default=None, help="Recovery rate.")
@click.option("--alpha", type=float, default=None, help="Link activation rate (rlad).")
@click.option("--omega", type=float, default=None, help="Link deletion rate (rlad).")
@click.option("--k1max", type=int, default=None, help="Link carrying capacity (rlad).")
@click.option("--N", "N", type=int, default=None, help="Population size (states 0..N).")
@click.option("--k0", type=int, default=None,
              help="Initial infected count; default round(0.05 N), at least 1 (0 for rlad).")
@click.option("--models", default="exact,pair,triple,binomial", show_default=True,
              help="Comma list from: " + ",".join(_MODEL_TOKENS) + ".")
@click.option("--t-end", type=float, default=15.0, show_default=True, help="End time.")
@click.option("--n-points", type=int, default=301, show_default=True, help="Output samples.")
@click.option("--rel-tol", type=float, default=None, help="Integrator relative tolerance.")
@click.option("--abs-tol", type=float, default=None, help="Integrator absolute tolerance.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file supplying any of these options (flags win).")
@click.pass_context
def timeseries(ctx, family, beta, tau, n_degree, variant, gamma, alpha, omega, k1max,
               N, k0, models, t_end, n_points, rel_tol, abs_tol, out, fmt, config_path):
    """Prevalence curves I(t)/N for the selected models."""
    _apply_config(ctx, config_path)
    _require_options(ctx.params, {"N": "--N", "out": "--out"})
    p = ctx.params
    family, beta, tau, n_degree, variant, gamma = (
        p["family"], p["beta"], p["tau"], p["n_degree"], p["variant"], p["gamma"])
    alpha, omega, k1max, N, k0, models = (
        p["alpha"], p["omega"], p["k1max"], p["N"], p["k0"], p["models"])
    t_end, n_points, rel_tol, abs_tol, out, fmt = (
        p["t_end"], p["n_points"], p["rel_tol"], p["abs_tol"], p["out"], p["fmt"])

    try:
        kinds = []
        for token in models.split(","):
            token = token.strip()
            if token not in _MODEL_TOKENS:
                raise click.UsageError(f"unknown model {token!r}")
            kinds.append(_MODEL_TOKENS[token])
        coeffs, beta_eff, gamma_eff = _resolve_family(
            family, beta, tau, n_degree, gamma, variant, alpha, omega, k1max, N)
        if beta_eff is None and any(kind is not ModelKind.EXACT for kind in kinds):
            raise click.UsageError("rlad supports only --models exact")
        if k0 is None:
            k0 = 0 if family == "rlad" else default_k0(N)
        _echo_params(command="timeseries", family=family, beta=beta_eff, gamma=gamma_eff,
                     alpha=alpha, omega=omega, k1max=k1max, N=N, k0=k0,
                     models=",".join(kind.value for kind in kinds), t_end=t_end,
                     n_points=n_points, out=out, format=fmt)
        result = run_timeseries(
            beta=beta_eff if beta_eff is not None else 1.0,
            gamma=gamma_eff if gamma_eff is not None else 1.0,
            N=N, k0=k0, models=kinds, t_end=t_end, n_points=n_points,
            config=_integrator_config(rel_tol, abs_tol), coeffs=coeffs,
        )
        export(result, fmt, out)
    except click.ClickException:
        raise
    except ParameterError as exc:
        raise click.UsageError(str(exc))
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--beta", type=float, default=None, help="Aggregate transmission rate.")
@click.option("--tau", type=float, default=None, help="Per-link rate; used as beta = tau * n.")
@click.option("--n-degree", type=int, default=None, help="Node degree for --tau.")
@click.option("--gamma", type=float, default=None, help="Recovery rate.")
@click.option("--N", "n_list", default=None, callback=_parse_int_list,
              help="Comma-separated system sizes, e.g. 100,200,400,800.")
@click.option("--verify-dynamics", is_flag=True, default=False,
              help="Also integrate the reduced models to steady state at N in {100,400}.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file supplying any of these options (flags win).")
@click.pass_context
def scan(ctx, beta, tau, n_degree, gamma, n_list, verify_dynamics, out, fmt, config_path):
    """Steady-state closure errors over N, with convergence-order fits."""
    _apply_config(ctx, config_path)
    _require_options(ctx.params, {"n_list": "--N"})
    p = ctx.params
    beta, tau, n_degree, gamma, n_list = (
        p["beta"], p["tau"], p["n_degree"], p["gamma"], p["n_list"])
    verify_dynamics, out, fmt = p["verify_dynamics"], p["out"], p["fmt"]

    try:
        beta, gamma = _effective_rates(beta, tau, n_degree, gamma)
        _echo_params(command="scan", beta=beta, gamma=gamma,
                     N=",".join(str(n) for n in n_list), out=out, format=fmt)
        result = run_error_scan(beta, gamma, n_list, verify_dynamics=verify_dynamics)
        for report in result.reports:
            scaled = report.scaled_errors
            click.echo(
                f"N={report.n_value}: exact={report.exact:.7f} "
                f"err_x1000 pair={scaled[0]:.4f} triple={scaled[1]:.4f} "
                f"binomial={scaled[2]:.4f}"
            )
        for name, fit in result.slopes.items():
            if fit is None:
                click.echo(f"slope[{name}]: not fitted")
            else:
                click.echo(f"slope[{name}] = {fit.slope:.4f} +/- {fit.stderr:.4f} "
                           f"({fit.n_points} points)")
        for key, residual in result.verification.items():
            click.echo(f"fixed-point residual {key}: {residual:.3e}")
        for note in result.notes:
            click.echo(f"note: {note}", err=True)
        if out is not None:
            export(result, fmt, out)
    except click.ClickException:
        raise
    except ParameterError as exc:
        raise click.UsageError(str(exc))
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--beta", type=float, default=None, help="Aggregate transmission rate.")
@click.option("--tau", type=float, default=None, help="Per-link rate; used as beta = tau * n.")
@click.option("--n-degree", type=int, default=None, help="Node degree for --tau.")
@click.option("--gamma", type=float, default=None, help="Recovery rate.")
@click.option("--N", "N", type=int, default=None, help="System size.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file supplying any of these options (flags win).")
@click.pass_context
def steady(ctx, beta, tau, n_degree, gamma, N, fmt, config_path):
    """Steady-state prevalences and approximation errors at one N."""
    _apply_config(ctx, config_path)
    _require_options(ctx.params, {"N": "--N"})
    p = ctx.params
    beta, tau, n_degree, gamma, N, fmt = (
        p["beta"], p["tau"], p["n_degree"], p["gamma"], p["N"], p["fmt"])

    try:
        beta, gamma = _effective_rates(beta, tau, n_degree, gamma)
        _echo_params(command="steady", beta=beta, gamma=gamma, N=N)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = build_report(beta, gamma, N)
        for w in caught:
            click.echo(f"flag: {w.message}", err=True)
        if fmt == "json":
            payload = {
                "N": report.n_value,
                "exact": report.exact,
                "pair": report.pair,
                "triple": report.triple,
                "binomial": report.binomial,
                "err_pair": report.err_pair,
                "err_triple": report.err_triple,
                "err_binomial": report.err_binomial,
            }
            click.echo(json.dumps(payload, indent=2, sort_keys=True))
        else:
            click.echo(f"exact    I/N = {report.exact:.10f}")
            click.echo(f"pair     I/N = {report.pair:.10f}  err = {report.err_pair:.6e}")
            click.echo(f"triple   I/N = {report.triple:.10f}  err = {report.err_triple:.6e}")
            click.echo(f"binomial I/N = {report.binomial:.10f}  err = {report.err_binomial:.6e}")
    except click.ClickException:
        raise
    except ParameterError as exc:
        raise click.UsageError(str(exc))
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--family", type=click.Choice(["complete", "homogeneous", "rlad"]),
              default="complete", show_default=True)
@click.option("--beta", type=float, default=None, help="Aggregate transmission rate (complete).")
@click.option("--tau", type=float, default=None, help="Per-link rate (homogeneous).")
@click.option("--n-degree", type=int, default=None, help="Node degree (homogeneous).")
@click.option("--variant", type=click.Choice(["modified", "original"]), default="modified",
              show_default=True)
@click.option("--gamma", type=float, default=None, help="Recovery rate.")
@click.option("--alpha", type=float, default=None, help="Link activation rate (rlad).")
@click.option("--omega", type=float, default=None, help="Link deletion rate (rlad).")
@click.option("--k1max", type=int, default=None, help="Link carrying capacity (rlad).")
@click.option("--N", "N", type=int, default=None, help="System size.")
@click.option("--k0", type=int, default=None,
              help="Initial state; default round(0.05 N), at least 1 (0 for rlad).")
@click.option("--runs", type=click.IntRange(min=1), default=None,
              help="Number of Gillespie realizations.")
@click.option("--t", "t_list", default=None, callback=_parse_float_list,
              help="Comma-separated comparison times, e.g. 1,5.")
@click.option("--seed", type=int, default=0, show_default=True, help="Ensemble seed.")
@click.option("--threshold", type=float, default=0.02, show_default=True,
              help="Maximum acceptable total-variation distance.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file supplying any of these options (flags win).")
@click.pass_context
def validate(ctx, family, beta, tau, n_degree, variant, gamma, alpha, omega, k1max,
             N, k0, runs, t_list, seed, threshold, config_path):
    """Compare Gillespie ensemble histograms against the integrated chain."""
    _apply_config(ctx, config_path)
    _require_options(ctx.params, {"N": "--N", "runs": "--runs", "t_list": "--t"})
    p = ctx.params
    family, beta, tau, n_degree, variant, gamma = (
        p["family"], p["beta"], p["tau"], p["n_degree"], p["variant"], p["gamma"])
    alpha, omega, k1max, N, k0 = p["alpha"], p["omega"], p["k1max"], p["N"], p["k0"]
    runs, t_list, seed, threshold = p["runs"], p["t_list"], p["seed"], p["threshold"]

    try:
        coeffs, _, _ = _resolve_family(
            family, beta, tau, n_degree, gamma, variant, alpha, omega, k1max, N)
        if k0 is None:
            k0 = 0 if family == "rlad" else default_k0(N)
        if any(t <= 0 for t in t_list):
            raise click.UsageError("comparison times must be positive")
        _echo_params(command="validate", family=family, beta=beta, tau=tau,
                     gamma=gamma, alpha=alpha, omega=omega, k1max=k1max,
                     N=N, k0=k0, runs=runs, t=",".join(str(t) for t in t_list),
                     seed=seed, threshold=threshold)

        samples = gillespie_run(coeffs, k0, SsaConfig(runs=runs, t_record=t_list, seed=seed))
        rhs = build_rhs(ModelKind.EXACT, 1.0, 1.0, N, coeffs=coeffs)
        trajectory = integrate(
            rhs, initial_state(ModelKind.EXACT, N, k0), (0.0, max(t_list)),
            output_times=t_list,
            config=IntegratorConfig(rel_tol=1e-10, abs_tol=1e-13),
        )
        all_ok = True
        for j, t in enumerate(t_list):
            empirical = empirical_distribution(samples[:, j], N, t=t)
            tv = total_variation(empirical, np.clip(trajectory.states[j], 0.0, None))
            ok = tv <= threshold
            all_ok = all_ok and ok
            click.echo(f"t={t:g}: tv={tv:.6f} threshold={threshold:g} "
                       f"{'ok' if ok else 'FAIL'}")
        sys.exit(0 if all_ok else 1)
    except click.ClickException:
        raise
    except ParameterError as exc:
        raise click.UsageError(str(exc))
    except SystemExit:
        raise
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
