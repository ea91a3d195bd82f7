"""
conekernel CLI - command-line interface for the cone-kernel library

This CLI provides:
- Kernel evaluation at one space-time point (conekernel eval)
- Grid scans to CSV (conekernel scan)
- Cross-validation of the methods (conekernel compare)
- Method-of-images check (conekernel images-check)
- Dispersive boundedness scan (conekernel dispersive)
- Empirical order fits (conekernel orders)
- Random-sample self checks (conekernel selfcheck)

Reports go to stdout (or --out) as JSON; logs and summaries go to stderr.
Exit codes: 0 pass, 1 comparison failure, 2 input error, 3 accuracy error.
"""

from __future__ import annotations

import json
import logging
import math
import sys
import tomllib
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator, Optional, TypeVar

import structlog
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel

from . import __version__
from .asymptotic import images_closed_form, images_order
from .evaluators import evaluate_auto, get_evaluator
from .exceptions import AccuracyException, DomainException, GeometryException, ValidityException
from .harness import Harness, write_csv
from .kernel import assemble_kernel, canonical_eta, reduce, time_reversed
from .models import ConeGeometry, EvalResult, KernelQuery, Method
from .schemas import GridSpec, Report
from .settings import Settings, load_settings, normalize_key, read_config_file

EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_ACCURACY = 3

app = typer.Typer(
    name="conekernel",
    help="Schrodinger kernel on a flat cone: evaluators and cross-validation harness",
    add_completion=False,
)
console = Console(stderr=True)

T = TypeVar("T")


@dataclass
class CliState:
    """Options shared by every command."""

    settings: Settings
    config: dict[str, str] = field(default_factory=dict)
    quiet: bool = False


class _StderrProxy:
    """File-like view of sys.stderr, looked up on every write."""

    def write(self, text: str) -> int:
        return sys.stderr.write(text)

    def flush(self) -> None:
        sys.stderr.flush()


def configure_logging(quiet: bool) -> None:
    """Route structlog to stderr; --quiet keeps warnings and errors only."""
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.WARNING if quiet else logging.INFO
        ),
        logger_factory=structlog.PrintLoggerFactory(file=_StderrProxy()),
        cache_logger_on_first_use=False,
    )


def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _parse_float_list(raw: str) -> list[float]:
    return [float(v) for v in raw.replace(";", ",").split(",") if v.strip()]


def _pick(
    state: CliState, key: str, flag: Optional[T], default: T, cast: Callable[[str], T]
) -> T:
    """Flag value, else config-file value, else the command default."""
    if flag is not None:
        return flag
    if key in state.config:
        try:
            return cast(state.config[key])
        except ValueError as e:
            raise typer.BadParameter(f"config key {key}={state.config[key]!r}: {e}") from e
    return default


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map library failures onto the documented exit codes."""
    try:
        yield
    except (ValidationError, DomainException, ValidityException) as e:
        console.print(f"[red]Input error:[/red] {e}")
        raise typer.Exit(EXIT_INPUT) from e
    except (typer.BadParameter, FileNotFoundError, ValueError) as e:
        console.print(f"[red]Input error:[/red] {e}")
        raise typer.Exit(EXIT_INPUT) from e
    except (AccuracyException, GeometryException) as e:
        console.print(f"[red]Accuracy error:[/red] {e}")
        raise typer.Exit(EXIT_ACCURACY) from e


def _state(ctx: typer.Context) -> CliState:
    obj = ctx.obj
    if not isinstance(obj, CliState):
        obj = CliState(settings=Settings())
        ctx.obj = obj
    return obj


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(text)
    else:
        out.write_text(text + "\n", encoding="utf-8")


def _finish(state: CliState, report: Report, out: Optional[Path], title: str) -> None:
    """Write the report, show a summary panel and exit 1 on failure."""
    _emit(report.to_json(), out)
    if not state.quiet:
        colour = "green" if report.passed else "red"
        verdict = "PASS" if report.passed else "FAIL"
        lines = [f"[bold {colour}]{title}: {verdict}[/bold {colour}]"]
        for key in sorted(report.summary):
            value = report.summary[key]
            if isinstance(value, (int, float, str, bool)):
                lines.append(f"  {key}: [cyan]{value}[/cyan]")
        console.print(Panel.fit("\n".join(lines), border_style=colour))
    if not report.passed:
        raise typer.Exit(EXIT_FAILED)


def _grid(
    state: CliState,
    defaults: dict[str, Any],
    rho: Optional[list[float]],
    x_min: Optional[float],
    x_max: Optional[float],
    x_count: Optional[int],
    eta_count: Optional[int],
    include_interface: Optional[bool],
    x_spacing: Optional[str],
) -> GridSpec:
    return GridSpec(
        rho_list=_pick(state, "rho", rho or None, defaults["rho_list"], _parse_float_list),
        x_min=_pick(state, "x_min", x_min, defaults["x_min"], float),
        x_max=_pick(state, "x_max", x_max, defaults["x_max"], float),
        x_count=_pick(state, "x_count", x_count, defaults["x_count"], int),
        eta_count=_pick(state, "eta_count", eta_count, defaults["eta_count"], int),
        include_interface=_pick(state, "include_interface", include_interface, False, _parse_bool),
        x_spacing=_pick(state, "x_spacing", x_spacing, defaults.get("x_spacing", "log"), str),
    )


def _grid_from_toml(path: Path) -> GridSpec:
    with path.open("rb") as fh:
        data = tomllib.load(fh)
    section = data.get("grid", data)
    return GridSpec(**{normalize_key(k): v for k, v in section.items()})


_COMPARE_GRID = {"rho_list": [1.0], "x_min": 0.5, "x_max": 20.0, "x_count": 16, "eta_count": 16}
_DISPERSIVE_GRID = {
    "rho_list": [1.0],
    "x_min": 0.0,
    "x_max": 500.0,
    "x_count": 100,
    "eta_count": 48,
    "x_spacing": "linear",
}

_RHO_OPT = typer.Option(None, "--rho", help="Cone radius (repeatable where a grid is built)")
_X_MIN_OPT = typer.Option(None, "--x-min", help="Smallest x")
_X_MAX_OPT = typer.Option(None, "--x-max", help="Largest x")
_X_COUNT_OPT = typer.Option(None, "--x-count", help="Number of x samples")
_ETA_COUNT_OPT = typer.Option(None, "--eta-count", help="eta samples per period")
_INTERFACE_OPT = typer.Option(
    None, "--include-interface/--no-include-interface", help="Add interface eta samples"
)
_SPACING_OPT = typer.Option(None, "--x-spacing", help="log or linear")
_OUT_OPT = typer.Option(None, "--out", "-o", help="Output file (stdout when omitted)")


@app.callback()
def main_callback(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="key=value config file"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for random samples"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Only warnings and errors on stderr"),
) -> None:
    """Schrodinger kernel on a flat cone."""
    configure_logging(quiet)
    with _exit_codes():
        values = read_config_file(config) if config is not None else {}
        settings = load_settings(values, seed=seed)
    ctx.obj = CliState(settings=settings, config=values, quiet=quiet)


def _evaluate_kernel(
    q: KernelQuery, g: ConeGeometry, method: str, state: CliState, kmax: Optional[int]
) -> EvalResult:
    """Kernel value at t > 0 with the requested method."""
    args = reduce(q, g)
    if method.startswith("images-"):
        N = int(method.split("-", 1)[1])
        if images_order(g) != N:
            raise DomainException(f"method {method} needs rho = 1/{N}, got rho={g.rho}")
        value = images_closed_form(q, N)
        return EvalResult(value=value, abs_err=0.0, method=Method.IMAGES)
    if method == "auto":
        S = evaluate_auto(args.x, args.eta, g, state.settings, kmax)
    else:
        S = get_evaluator(method, state.settings, kmax).evaluate(args.x, args.eta, g)
    return assemble_kernel(S, q, g)


@app.command("eval")
def eval_command(
    ctx: typer.Context,
    rho: Optional[float] = typer.Option(None, "--rho", help="Cone radius"),
    t: Optional[float] = typer.Option(None, "--t", help="Time (negative uses K(-t) = conj K(t))"),
    r1: Optional[float] = typer.Option(None, "--r1", help="Radius of the first point"),
    th1: Optional[float] = typer.Option(None, "--th1", help="Angle of the first point"),
    r2: Optional[float] = typer.Option(None, "--r2", help="Radius of the second point"),
    th2: Optional[float] = typer.Option(None, "--th2", help="Angle of the second point"),
    method: Optional[str] = typer.Option(
        None, "--method", "-m", help="auto|series|contour|small-x|uniform|preliminary|images-N"
    ),
    kmax: Optional[int] = typer.Option(None, "--kmax", help="Diffractive order for uniform"),
    out: Optional[Path] = _OUT_OPT,
) -> None:
    """Evaluate the kernel at one space-time point."""
    state = _state(ctx)
    with _exit_codes():
        g = ConeGeometry(rho=_pick(state, "rho", rho, 1.0, float))
        t_value = _pick(state, "t", t, 1.0, float)
        if t_value == 0.0 or not math.isfinite(t_value):
            raise DomainException(f"t must be non-zero and finite, got {t_value}")
        q = KernelQuery(
            t=abs(t_value),
            r1=_pick(state, "r1", r1, 1.0, float),
            r2=_pick(state, "r2", r2, 1.0, float),
            theta1=_pick(state, "th1", th1, 0.0, float),
            theta2=_pick(state, "th2", th2, 0.0, float),
        )
        chosen = _pick(state, "method", method, "auto", str).replace("_", "-")
        k = _pick(state, "kmax", kmax, state.settings.kmax, int)
        K = _evaluate_kernel(q, g, chosen, state, k)
        if t_value < 0:
            K = time_reversed(K)
        args = reduce(q, g)
        payload = {
            "value_re": K.value.real,
            "value_im": K.value.imag,
            "abs_err": K.abs_err,
            "method": K.method.value,
            "rigorous": K.rigorous,
            "x": args.x,
            "eta": canonical_eta(args.eta, g),
        }
    _emit(json.dumps(payload, indent=2, sort_keys=True), out)


@app.command()
def scan(
    ctx: typer.Context,
    rho: Optional[float] = typer.Option(None, "--rho", help="Cone radius"),
    x_min: Optional[float] = _X_MIN_OPT,
    x_max: Optional[float] = _X_MAX_OPT,
    x_count: Optional[int] = _X_COUNT_OPT,
    eta_count: Optional[int] = _ETA_COUNT_OPT,
    include_interface: Optional[bool] = _INTERFACE_OPT,
    x_spacing: Optional[str] = _SPACING_OPT,
    method: Optional[str] = typer.Option(None, "--method", "-m", help="auto or a method name"),
    out: Optional[Path] = _OUT_OPT,
) -> None:
    """Evaluate S over a grid and write rho,x,eta,method,re,im,abs_err as CSV."""
    state = _state(ctx)
    with _exit_codes():
        grid = _grid(
            state,
            _COMPARE_GRID,
            [rho] if rho is not None else None,
            x_min,
            x_max,
            x_count,
            eta_count,
            include_interface,
            x_spacing,
        )
        g = ConeGeometry(rho=grid.rho_list[0])
        chosen = _pick(state, "method", method, "auto", str).replace("-", "_")
        df = Harness(state.settings).scan(g, grid, chosen)
        if out is None:
            write_csv(df, sys.stdout)
        else:
            write_csv(df, out)
    if not state.quiet:
        console.print(f"[green]{len(df)} rows[/green]")


@app.command()
def compare(
    ctx: typer.Context,
    grid_file: Optional[Path] = typer.Option(None, "--grid", help="TOML grid file"),
    rho: Optional[list[float]] = _RHO_OPT,
    x_min: Optional[float] = _X_MIN_OPT,
    x_max: Optional[float] = _X_MAX_OPT,
    x_count: Optional[int] = _X_COUNT_OPT,
    eta_count: Optional[int] = _ETA_COUNT_OPT,
    include_interface: Optional[bool] = _INTERFACE_OPT,
    x_spacing: Optional[str] = _SPACING_OPT,
    tol: Optional[float] = typer.Option(None, "--tol", help="Comparison tolerance"),
    kmax: Optional[int] = typer.Option(None, "--kmax", help="Diffractive order for uniform"),
    out: Optional[Path] = _OUT_OPT,
) -> None:
    """Cross-validate every valid method pairwise on a grid."""
    state = _state(ctx)
    with _exit_codes():
        if grid_file is not None:
            grid = _grid_from_toml(grid_file)
        else:
            grid = _grid(
                state,
                _COMPARE_GRID,
                rho,
                x_min,
                x_max,
                x_count,
                eta_count,
                include_interface,
                x_spacing,
            )
        harness = Harness(state.settings, kmax=_pick(state, "kmax", kmax, None, int))
        report = harness.compare(grid, _pick(state, "tol", tol, None, float))
    _finish(state, report, out, "compare")


@app.command("images-check")
def images_check(
    ctx: typer.Context,
    n: Optional[int] = typer.Option(None, "--n", help="Number of images N (rho = 1/N)"),
    x_min: Optional[float] = _X_MIN_OPT,
    x_max: Optional[float] = _X_MAX_OPT,
    x_count: Optional[int] = _X_COUNT_OPT,
    eta_count: Optional[int] = _ETA_COUNT_OPT,
    include_interface: Optional[bool] = _INTERFACE_OPT,
    x_spacing: Optional[str] = _SPACING_OPT,
    tol: Optional[float] = typer.Option(None, "--tol", help="Maximum kernel difference"),
    out: Optional[Path] = _OUT_OPT,
) -> None:
    """Compare the series kernel at rho = 1/N with the method-of-images sum."""
    state = _state(ctx)
    with _exit_codes():
        N = _pick(state, "n", n, 1, int)
        grid = _grid(
            state,
            _COMPARE_GRID,
            [1.0 / N] if N > 0 else None,
            x_min,
            x_max,
            x_count,
            eta_count,
            include_interface,
            x_spacing,
        )
        tolerance = _pick(state, "tol", tol, None, float)
        report = Harness(state.settings).images_check(N, grid, tolerance)
    _finish(state, report, out, f"images-check N={N}")


@app.command()
def dispersive(
    ctx: typer.Context,
    rho: Optional[float] = typer.Option(None, "--rho", help="Cone radius"),
    x_min: Optional[float] = _X_MIN_OPT,
    x_max: Optional[float] = _X_MAX_OPT,
    x_count: Optional[int] = _X_COUNT_OPT,
    eta_count: Optional[int] = _ETA_COUNT_OPT,
    include_interface: Optional[bool] = _INTERFACE_OPT,
    x_spacing: Optional[str] = _SPACING_OPT,
    kmax: Optional[int] = typer.Option(None, "--kmax", help="Diffractive order above x = 40"),
    out: Optional[Path] = _OUT_OPT,
) -> None:
    """Scan sup |S| and check it stays bounded as x grows."""
    state = _state(ctx)
    with _exit_codes():
        grid = _grid(
            state,
            _DISPERSIVE_GRID,
            [rho] if rho is not None else None,
            x_min,
            x_max,
            x_count,
            eta_count,
            include_interface,
            x_spacing,
        )
        g = ConeGeometry(rho=grid.rho_list[0])
        harness = Harness(state.settings, kmax=_pick(state, "kmax", kmax, None, int))
        report = harness.dispersive_scan(g, grid)
    _finish(state, report, out, f"dispersive rho={g.rho}")


@app.command()
def orders(
    ctx: typer.Context,
    rho: Optional[float] = typer.Option(None, "--rho", help="Cone radius"),
    eta: Optional[float] = typer.Option(None, "--eta", help="Angle difference theta1 - theta2"),
    mode: Optional[str] = typer.Option(None, "--mode", help="small or large"),
    kmax: Optional[int] = typer.Option(None, "--kmax", help="Diffractive order (large mode)"),
    out: Optional[Path] = _OUT_OPT,
) -> None:
    """Fit the empirical small-x or large-x order."""
    state = _state(ctx)
    with _exit_codes():
        g = ConeGeometry(rho=_pick(state, "rho", rho, 1.0, float))
        chosen = _pick(state, "mode", mode, "small", str).replace("_x", "")
        if chosen not in {"small", "large"}:
            raise typer.BadParameter(f"--mode must be small or large, got {chosen!r}")
        harness = Harness(state.settings, kmax=_pick(state, "kmax", kmax, None, int))
        report = harness.order_check(
            g,
            _pick(state, "eta", eta, 1.0, float),
            "small_x" if chosen == "small" else "large_x",
        )
    _finish(state, report, out, f"orders {chosen}")


@app.command()
def selfcheck(
    ctx: typer.Context,
    samples: Optional[int] = typer.Option(None, "--samples", help="Random b_0 samples"),
    out: Optional[Path] = _OUT_OPT,
) -> None:
    """Random-sample checks of Bessel, erfc and the b_0 closed form."""
    state = _state(ctx)
    with _exit_codes():
        count = _pick(state, "samples", samples, 20, int)
        report = Harness(state.settings).selfcheck(samples=count)
    _finish(state, report, out, "selfcheck")


@app.command()
def version() -> None:
    """Show the package version."""
    typer.echo(__version__)


def main() -> None:
    """Entry point for the conekernel console script."""
    app()


if __name__ == "__main__":
    main()
