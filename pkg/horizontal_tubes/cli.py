"""
Command line interface.

Each subcommand is a handler whose inputs are declared as dependencies.
The parsed :class:`RunConfig` seeds the resolver cache; everything else
(parameters, grids, the output stream) is built from it on demand.
"""

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from functools import partial
from logging import getLogger
from pathlib import Path
from typing import (
    Any,
    Callable,
    Dict,
    Generator,
    List,
    Mapping,
    NoReturn,
    Optional,
    Sequence,
    TextIO,
)

import anyio
import numpy as np
from taskiq_dependencies import DependencyGraph, Depends

from horizontal_tubes.curvature import DEFAULT_STEP, mean_curvature_grid
from horizontal_tubes.csvio import read_overlay_csv, write_profile_csv, write_rows
from horizontal_tubes.exceptions import DomainError, NonToralSisterError, NumericalError
from horizontal_tubes.figures import (
    FIGURES,
    isoperimetric_plot,
    profile_plot,
    reproduce_figure,
)
from horizontal_tubes.foliation import embeddedness, foliation_criterion, tangency_scan
from horizontal_tubes.isoperimetric import (
    IsoperimetricRecord,
    VolumeMethod,
    isoperimetric_sweep,
    isoperimetric_sweep_async,
)
from horizontal_tubes.profile import TubeParams, integrate_profile, sample_profile
from horizontal_tubes.sister import (
    SisterParams,
    conformal_profile,
    lattice_b,
    normalized_conformal_class,
    sister_params,
)
from horizontal_tubes.space import SpaceParams, classify_space
from horizontal_tubes.utils import inclusive_grid, parse_range

logger = getLogger("horizontal_tubes.cli")

OUTPUT_DIR_ENV = "HTUBES_OUTPUT_DIR"
DEFAULT_OUT_DIR = "figures"
ISOPERIMETRIC_HEADER = (
    "H",
    "volume",
    "area",
    "complement_volume",
    "foliates",
    "error",
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3

# Flags shared by every subcommand; everything else lands in RunConfig.params.
_GLOBAL_FLAGS = ("subcommand", "output", "format", "tol", "verbose")


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation."""

    subcommand: str
    params: Mapping[str, Any] = field(default_factory=dict)
    output_path: Optional[Path] = None
    format: Optional[str] = None
    tol: float = 1e-10
    verbose: int = 0


def output_dir_from_env() -> Optional[Path]:
    """
    Base directory for relative output paths.

    :return: value of ``HTUBES_OUTPUT_DIR`` if it is set.
    """
    value = os.environ.get(OUTPUT_DIR_ENV)
    if not value:
        return None
    return Path(value)


def resolve_output_path(path: Path) -> Path:
    """
    Anchor a relative path at ``HTUBES_OUTPUT_DIR``.

    :param path: path given on the command line.
    :return: path to write to.
    """
    base = output_dir_from_env()
    if base is None or path.is_absolute():
        return path
    return base / path


def space_params(config: RunConfig = Depends()) -> SpaceParams:
    """Ambient space from ``--kappa`` and ``--tau``."""
    return SpaceParams(config.params["kappa"], config.params["tau"])


def tube_params(config: RunConfig = Depends()) -> TubeParams:
    """Tube from ``--kappa``, ``--tau`` and ``--h``."""
    return TubeParams(config.params["kappa"], config.params["tau"], config.params["h"])


def grid_option(config: RunConfig = Depends(), name: str = "") -> Optional[np.ndarray]:
    """
    Grid built from a ``start:stop:step`` option.

    :param config: current invocation.
    :param name: option name in ``config.params``.
    :return: grid values, or None if the option was not given.
    """
    bounds = config.params.get(name)
    if bounds is None:
        return None
    return inclusive_grid(*bounds)


def output_stream(config: RunConfig = Depends()) -> Generator[TextIO, None, None]:
    """
    Stream the result is written to.

    :param config: current invocation.
    :yield: stdout, or the ``--output`` file which is closed on teardown.
    """
    if config.output_path is None:
        yield sys.stdout
        return
    config.output_path.parent.mkdir(parents=True, exist_ok=True)
    with config.output_path.open("w", newline="", encoding="utf-8") as stream:
        yield stream


def _write_json(stream: TextIO, payload: Mapping[str, Any]) -> None:
    stream.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def run_classify(
    space: SpaceParams = Depends(space_params),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Classify E(κ,τ)."""
    space_class = classify_space(space)
    _write_json(
        stream,
        {
            "kappa": space.kappa,
            "tau": space.tau,
            "tag": space_class.tag.value,
            "is_product": space_class.is_product,
        },
    )


def run_profile(
    tube: TubeParams = Depends(tube_params),
    phi_grid: Optional[np.ndarray] = Depends(grid_option, kwargs={"name": "phi_range"}),
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Sample the profile curve of one tube."""
    if phi_grid is None:
        phi_grid = np.linspace(0.0, 2 * math.pi, 361)
    if config.params.get("ode"):
        curve = integrate_profile(
            tube,
            float(phi_grid[0]),
            float(phi_grid[-1]),
            config.tol,
            num_samples=len(phi_grid),
        )
    else:
        curve = sample_profile(tube, phi_grid)
    if config.format == "json":
        _write_json(
            stream,
            {
                "kappa": tube.kappa,
                "tau": tube.tau,
                "H": tube.H,
                "samples": [list(sample) for sample in curve.samples],
            },
        )
    elif config.format == "svg":
        plot = profile_plot(tube.space, [])
        plot.polyline(list(zip(curve.r, curve.h)))
        stream.write(plot.render())
    else:
        write_profile_csv(curve, stream)


def run_verify_h(
    tube: TubeParams = Depends(tube_params),
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Check the prescribed mean curvature by finite differences."""
    rows = mean_curvature_grid(tube, config.params["grid"], config.params["step"])
    if config.format == "json":
        values = np.array([row[2] for row in rows])
        _write_json(
            stream,
            {
                "H": tube.H,
                "points": len(rows),
                "mean": float(values.mean()),
                "std": float(values.std()),
                "max_error": float(np.abs(values - tube.H).max()),
            },
        )
        return
    write_rows(
        stream,
        ("phi", "v", "H_num", "abs_err"),
        ((phi, v, value, abs(value - tube.H)) for phi, v, value in rows),
    )


def _default_h_grid(space: SpaceParams) -> np.ndarray:
    threshold = math.sqrt(max(-space.kappa, 0.0)) / 2
    return threshold + inclusive_grid(0.01, 5.0, 0.01)


def run_foliation(
    space: SpaceParams = Depends(space_params),
    h_grid: Optional[np.ndarray] = Depends(grid_option, kwargs={"name": "h_grid"}),
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Decide the foliation and scan the maximum heights."""
    if h_grid is None:
        h_grid = _default_h_grid(space)
    report = foliation_criterion(space)
    scan = tangency_scan(space, h_grid)
    embedded = [embeddedness(TubeParams(space.kappa, space.tau, row.H)) for row in scan]
    if config.format == "csv":
        write_rows(
            stream,
            ("H", "max_height", "turning_point", "embedded"),
            (
                (row.H, row.max_height, row.turning_point, flag)
                for row, flag in zip(scan, embedded)
            ),
        )
        return
    _write_json(
        stream,
        {
            "kappa": space.kappa,
            "tau": space.tau,
            "x0": report.x0,
            "criterion_value": report.criterion_value,
            "foliates": report.foliates,
            "H0": report.H0,
            "foliated_set": report.foliated_set.value,
            "turning_points": [row.H for row in scan if row.turning_point],
            "non_embedded": [row.H for row, flag in zip(scan, embedded) if not flag],
        },
    )


def run_sister(
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Sister parameters and, for helicoids, the conformal class."""
    params = config.params
    source = SisterParams(
        params["kappa_t"],
        params["tau_t"],
        params["h_t"],
        params["theta"],
    )
    sister = sister_params(source)
    payload: Dict[str, Any] = {
        "kappa": sister.kappa,
        "tau": sister.tau,
        "H": sister.H,
        "a": None,
        "b": None,
        "normalized_class": None,
        "reduced": None,
    }
    if source.H_t == 0 and source.kappa_t > 0 and source.tau_t != 0:
        payload["a"] = conformal_profile(source.kappa_t, source.tau_t).a
        try:
            conformal = normalized_conformal_class(
                source.kappa_t,
                source.tau_t,
                source.theta,
                config.tol,
            )
        except NonToralSisterError:
            logger.info("The sister of phase %s is not a torus", source.theta)
        else:
            payload["b"] = 2 * math.pi * conformal.first
            payload["normalized_class"] = [conformal.first, conformal.second]
            payload["reduced"] = conformal.reduced
    _write_json(stream, payload)


def _lattice_row(
    kappa_t: float,
    tau_t: float,
    theta: float,
    tol: float,
) -> Optional[float]:
    try:
        return lattice_b(kappa_t, tau_t, theta, tol)
    except NonToralSisterError:
        return None


def run_lattice_sweep(
    theta_grid: Optional[np.ndarray] = Depends(
        grid_option,
        kwargs={"name": "theta_range"},
    ),
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Shear b(θ) of the sister lattices along a grid of phases."""
    kappa_t, tau_t = config.params["kappa_t"], config.params["tau_t"]
    thetas = [] if theta_grid is None else [float(theta) for theta in theta_grid]
    write_rows(
        stream,
        ("theta", "b"),
        ((theta, _lattice_row(kappa_t, tau_t, theta, config.tol)) for theta in thetas),
    )


def run_conformal(
    s_grid: Optional[np.ndarray] = Depends(grid_option, kwargs={"name": "s_range"}),
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Conformal factor of the minimal helicoid torus."""
    profile = conformal_profile(config.params["kappa_t"], config.params["tau_t"])
    if s_grid is None:
        _write_json(stream, {"a": profile.a, "jump": profile.jump})
        return
    values = profile(s_grid)
    slopes = profile.derivative(s_grid)
    write_rows(
        stream,
        ("s", "g", "g_prime"),
        (
            (float(s), float(g), float(slope))
            for s, g, slope in zip(s_grid, values, slopes)
        ),
    )


def _sweep(config: RunConfig) -> List[IsoperimetricRecord]:
    tau = config.params["tau"]
    start, stop, step = config.params["h_range"]
    method = config.params["volume_method"]
    workers = config.params["workers"]
    if workers > 1:
        return anyio.run(
            partial(
                isoperimetric_sweep_async,
                tau,
                start,
                stop,
                step,
                config.tol,
                method,
                workers=workers,
            ),
        )
    return isoperimetric_sweep(tau, start, stop, step, config.tol, method)


def run_isoperimetric(
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Areas and enclosed volumes along a grid of H in E(4,τ)."""
    records = _sweep(config)
    if config.format == "svg":
        overlay_path = config.params.get("overlay")
        overlay = read_overlay_csv(overlay_path) if overlay_path else None
        plot = isoperimetric_plot(config.params["tau"], records, overlay)
        stream.write(plot.render())
        return
    write_rows(
        stream,
        ISOPERIMETRIC_HEADER,
        (
            (
                row.H,
                row.volume,
                row.area,
                row.complement_volume,
                row.foliates,
                row.error,
            )
            for row in records
        ),
    )


def run_reproduce(
    config: RunConfig = Depends(),
    stream: TextIO = Depends(output_stream),
) -> None:
    """Write the panels of a figure recipe and list them."""
    out_dir = config.params.get("out_dir")
    if out_dir is None:
        out_dir = output_dir_from_env() or Path(DEFAULT_OUT_DIR)
    paths = reproduce_figure(
        config.params["figure"],
        out_dir,
        h_step=config.params.get("h_step"),
        tol=config.tol,
    )
    for path in paths:
        stream.write(f"{path}\n")


HANDLERS: Dict[str, Callable[..., None]] = {
    "classify": run_classify,
    "profile": run_profile,
    "verify-h": run_verify_h,
    "foliation": run_foliation,
    "sister": run_sister,
    "lattice-sweep": run_lattice_sweep,
    "conformal": run_conformal,
    "isoperimetric": run_isoperimetric,
    "reproduce": run_reproduce,
}

GRAPHS = {name: DependencyGraph(handler) for name, handler in HANDLERS.items()}


def dispatch(cfg: RunConfig) -> int:
    """
    Run the handler of a subcommand.

    :param cfg: parsed invocation.
    :return: exit status, 2 on domain errors and 3 on numerical failures.
    """
    graph = GRAPHS[cfg.subcommand]
    logger.debug("Dispatching %s", cfg)
    try:
        with graph.sync_ctx({RunConfig: cfg}, exception_propagation=False) as ctx:
            graph.target(**ctx.resolve_kwargs())
    except NumericalError as exc:
        sys.stderr.write(f"htubes: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (DomainError, ValueError) as exc:
        sys.stderr.write(f"htubes: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"htubes: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _range(text: str) -> Any:
    try:
        return parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_finite_float, default=1e-10)
    common.add_argument("-o", "--output", type=Path, default=None)
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def _add_space(sub: argparse.ArgumentParser, source: bool = False) -> None:
    if source:
        sub.add_argument("--kappa-t", type=_finite_float, required=True)
        sub.add_argument("--tau-t", type=_finite_float, required=True)
    else:
        sub.add_argument("--kappa", type=_finite_float, required=True)
        sub.add_argument("--tau", type=_finite_float, required=True)


def build_parser() -> argparse.ArgumentParser:
    """
    Parser of the ``htubes`` command.

    :return: argument parser.
    """
    common = _common_parser()
    parser = _Parser(prog="htubes", description="Horizontal CMC tubes in E(κ,τ).")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, formats: Sequence[str], help_text: str) -> Any:
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("--format", choices=formats, default=formats[0])
        return sub

    sub = add("classify", ["json"], "classify E(κ,τ)")
    _add_space(sub)

    sub = add("profile", ["csv", "json", "svg"], "sample a profile curve")
    _add_space(sub)
    sub.add_argument("--h", type=_finite_float, required=True)
    sub.add_argument("--phi-range", type=_range, default=None)
    sub.add_argument("--ode", action="store_true")

    sub = add("verify-h", ["csv", "json"], "check the mean curvature numerically")
    _add_space(sub)
    sub.add_argument("--h", type=_finite_float, required=True)
    sub.add_argument("--grid", type=_positive_int, default=5)
    sub.add_argument("--step", type=_finite_float, default=DEFAULT_STEP)

    sub = add("foliation", ["json", "csv"], "decide whether the tubes foliate")
    _add_space(sub)
    sub.add_argument("--h-grid", type=_range, default=None)

    sub = add("sister", ["json"], "sister parameters and conformal class")
    _add_space(sub, source=True)
    sub.add_argument("--h-t", type=_finite_float, default=0.0)
    sub.add_argument("--theta", type=_finite_float, required=True)

    sub = add("lattice-sweep", ["csv"], "lattice shear along a grid of phases")
    _add_space(sub, source=True)
    sub.add_argument("--theta-range", type=_range, required=True)

    sub = add("conformal", ["json", "csv"], "conformal factor of a helicoid torus")
    _add_space(sub, source=True)
    sub.add_argument("--s-range", type=_range, default=None)

    sub = add("isoperimetric", ["csv", "svg"], "areas and volumes in E(4,τ)")
    sub.add_argument("--tau", type=_finite_float, required=True)
    sub.add_argument("--h-range", type=_range, required=True)
    sub.add_argument("--overlay", type=Path, default=None)
    sub.add_argument("--workers", type=_positive_int, default=1)
    sub.add_argument(
        "--volume-method",
        choices=[method.value for method in VolumeMethod],
        default=VolumeMethod.REDUCED.value,
    )

    sub = subparsers.add_parser("reproduce", parents=[common], help="write figures")
    sub.add_argument("--figure", choices=FIGURES, required=True)
    sub.add_argument("--out-dir", type=Path, default=None)
    sub.add_argument("--h-step", type=_finite_float, default=None)
    return parser


def _check(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.subcommand == "conformal" and args.format == "csv" and not args.s_range:
        parser.error("conformal --format csv needs --s-range")
    if args.subcommand == "isoperimetric" and args.overlay and args.format != "svg":
        parser.error("--overlay is only drawn with --format svg")
    if args.tol <= 0:
        parser.error("--tol must be positive")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Build the run configuration from parsed arguments.

    :param args: parsed arguments.
    :return: configuration.
    """
    params = {
        key: value for key, value in vars(args).items() if key not in _GLOBAL_FLAGS
    }
    output = args.output
    return RunConfig(
        subcommand=args.subcommand,
        params=params,
        output_path=None if output is None else resolve_output_path(output),
        format=getattr(args, "format", None),
        tol=args.tol,
        verbose=args.verbose,
    )


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of ``htubes``.

    :param argv: arguments without the program name, sys.argv by default.
    :return: exit status.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _check(parser, args)
    _configure_logging(args.verbose)
    return dispatch(config_from_args(args))
