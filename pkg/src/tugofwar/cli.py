"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 internal
consistency failure.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import io as tio
from . import reduction as red
from .dynamics import StepRejected, basin_sample, integrate
from .params import ConfigError, is_param_name, load_config
from .solver import ConsistencyError, RootFindingError, classify_all, scan_parameter
from .stochastic import MotorState, gillespie_run

EXIT_USAGE = 1
EXIT_CONSISTENCY = 2


class _Group(click.Group):
    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.UsageError as exc:
            exc.show()
            rv = EXIT_USAGE
        except click.ClickException as exc:
            exc.show()
            rv = exc.exit_code
        except click.Abort:
            click.echo("Aborted!", err=True)
            rv = EXIT_USAGE
        if not standalone_mode:
            return rv
        sys.exit(rv if isinstance(rv, int) else 0)


class ConfigProblem(click.ClickException):
    exit_code = EXIT_USAGE


class Inconsistent(click.ClickException):
    exit_code = EXIT_CONSISTENCY


def _load(path):
    try:
        return load_config(path)
    except ConfigError as exc:
        raise ConfigProblem(f"bad config: {exc}") from None
    except OSError as exc:
        raise ConfigProblem(f"cannot read config: {exc}") from None


def _classify(cfg, grid):
    try:
        return classify_all(cfg, grid)
    except (ConsistencyError, RootFindingError) as exc:
        raise Inconsistent(str(exc)) from None


def _finish(ctx, out, outputs, cfg, seeds=(), extra=None):
    if out is not None:
        tio.write_manifest(out, ctx.info_name, dict(ctx.params), cfg, outputs, seeds, extra)


config_arg = click.argument("config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
out_opt = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                       help="Output file (stdout if omitted); a manifest is written next to it.")
fmt_opt = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)


@click.group(cls=_Group)
@click.version_option(package_name="artifact")
def cli():
    """Tug-of-war cargo transport: stationary states and simulations."""


@cli.command()
@config_arg
@fmt_opt
@out_opt
@click.option("--grid", default=4096, show_default=True, help="Root-search grid points.")
@click.pass_context
def roots(ctx, config_path, fmt, out, grid):
    """Stationary states with stability labels."""
    cfg = _load(config_path)
    states = _classify(cfg, grid)
    tio.emit(tio.states_csv(states) if fmt == "csv" else tio.states_json(states), out)
    _finish(ctx, out, [out], cfg)


@cli.command()
@config_arg
@click.option("--which", type=click.Choice(["w", "what", "h"]), default="what", show_default=True)
@click.option("--grid", default=2000, show_default=True, help="Number of curve samples.")
@click.option("--theta-max", default=10.0, show_default=True, help="Upper end of the theta range for --which h.")
@fmt_opt
@out_opt
@click.pass_context
def curve(ctx, config_path, which, grid, theta_max, fmt, out):
    """Sample h(theta), w or w_hat on a uniform grid (curve data for plotting)."""
    cfg = _load(config_path)
    if grid < 2:
        raise click.UsageError("--grid must be at least 2")
    if which == "h":
        xs = np.linspace(0.0, theta_max, grid)
        values = [red.h_eval(x, cfg) for x in xs]
        column = "theta"
    else:
        xs = np.linspace(0.0, 2.0 - 1e-6, grid)
        fn = red.w_eval if which == "w" else red.w_hat_eval
        values = [fn(x, cfg) for x in xs]
        column = "vartheta"
    if fmt == "csv":
        text = tio.csv_text([column, "value"], zip(xs, values))
    else:
        text = tio.json_text({column: xs, "value": values})
    tio.emit(text, out)
    _finish(ctx, out, [out], cfg)


@cli.command()
@config_arg
@click.option("--param", "parameter", required=True,
              help="nu, a motor field with _plus/_minus suffix, or a bare field (e.g. V_F) for both motors.")
@click.option("--from", "start", type=float, required=True)
@click.option("--to", "stop", type=float, required=True)
@click.option("--steps", type=int, default=41, show_default=True)
@click.option("--grid", default=4096, show_default=True)
@fmt_opt
@out_opt
@click.pass_context
def scan(ctx, config_path, parameter, start, stop, steps, grid, fmt, out):
    """Sweep one parameter and locate bifurcations.

    With --out, writes both <out stem>.csv and <out stem>.json.
    """
    cfg = _load(config_path)
    if not is_param_name(parameter):
        raise click.UsageError(f"unknown parameter {parameter!r}")
    if steps < 2 or not stop > start:
        raise click.UsageError("empty range: need --to > --from and --steps >= 2")
    try:
        result = scan_parameter(cfg, parameter, np.linspace(start, stop, steps), grid)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    bif = [b.value for b in result.bifurcations]
    if out is None:
        tio.emit(tio.scan_csv(result) if fmt == "csv" else tio.scan_json(result), None)
        return
    csv_path, json_path = out.with_suffix(".csv"), out.with_suffix(".json")
    tio.emit(tio.scan_csv(result), csv_path)
    tio.emit(tio.scan_json(result), json_path)
    _finish(ctx, out, [csv_path, json_path], cfg, extra={"bifurcation_values": bif})


@cli.command()
@config_arg
@click.option("--y0", type=float, default=0.9, show_default=True)
@click.option("--z0", type=float, default=0.1, show_default=True)
@click.option("--t-end", type=float, default=200.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--stride", type=int, default=100, show_default=True)
@out_opt
@click.pass_context
def trace(ctx, config_path, y0, z0, t_end, dt, stride, out):
    """Integrate the mean-field flow from (y0, z0); CSV columns t, y, z."""
    cfg = _load(config_path)
    try:
        traj = integrate(y0, z0, cfg, t_end, dt, stride)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    except StepRejected as exc:
        raise ConfigProblem(f"{exc}; reduce --dt") from None
    tio.emit(tio.csv_text(["t", "y", "z"], zip(traj.t, traj.y, traj.z)), out)
    _finish(ctx, out, [out], cfg, extra={"converged": traj.converged, "terminal": list(traj.terminal)})


@cli.command()
@config_arg
@click.option("--t-end", type=float, default=1000.0, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--n-plus0", type=int, default=None, help="Initial attached plus motors (default N+/2).")
@click.option("--n-minus0", type=int, default=None, help="Initial attached minus motors (default N-/2).")
@click.option("--events", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also write the event log (t, n_plus, n_minus) as CSV here.")
@out_opt
@click.pass_context
def gillespie(ctx, config_path, t_end, seed, n_plus0, n_minus0, events, out):
    """Exact stochastic simulation of the attachment chain; summary as JSON."""
    cfg = _load(config_path)
    if cfg.n_plus_total is None or cfg.n_minus_total is None:
        raise ConfigProblem("bad config: 'N_plus' and 'N_minus' are required for simulation")
    initial = None
    if n_plus0 is not None or n_minus0 is not None:
        initial = MotorState(cfg.n_plus_total // 2 if n_plus0 is None else n_plus0,
                             cfg.n_minus_total // 2 if n_minus0 is None else n_minus0)
    try:
        record = gillespie_run(cfg, t_end, seed, initial, record_events=events is not None)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    tio.emit(tio.json_text(record.summary()), out)
    outputs = [out]
    if events is not None:
        tio.emit(tio.csv_text(["t", "n_plus", "n_minus"], record.events), events)
        outputs.append(events)
    _finish(ctx, out, outputs, cfg, seeds=[seed])


@cli.command()
@config_arg
@click.option("--starts", type=int, default=100, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--t-end", type=float, default=200.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--grid", default=4096, show_default=True)
@out_opt
@click.pass_context
def basin(ctx, config_path, starts, seed, t_end, dt, grid, out):
    """Where quasi-random starts end up; histogram as JSON."""
    cfg = _load(config_path)
    states = _classify(cfg, grid)
    try:
        hist = basin_sample(cfg, states, starts, seed, t_end, dt)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    except StepRejected as exc:
        raise ConfigProblem(f"{exc}; reduce --dt") from None
    tio.emit(tio.json_text({"states": states, "histogram": hist}), out)
    _finish(ctx, out, [out], cfg, seeds=[seed])


def main(argv=None):
    return cli.main(argv, prog_name="tugofwar")


if __name__ == "__main__":
    main()
