"""Command implementations behind main.py: verify, geometry, symmetry and export.

Exit codes: 0 pass, 1 usage or configuration error, 2 verification failure, 3 numerical
singularity.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from . import __version__
from .core.cache import NetCache
from .core.config import settings
from .core.errors import ConfigError, LabError
from .core.monitoring import get_monitor
from .export import csv_text, gnuplot_text, json_text, write_text
from .families.registry import TransformSpec, build_net, load_family_spec
from .geometry.curvature import curvature_row, curvatures_from, level_set_summary
from .geometry.phi import cyclicity_check
from .lame.net import GuichardNet, TranslationInvariant
from .lame.residuals import ResidualReport, default_first_order_tol, first_order_residuals, second_order_residuals
from .symmetry.batch import verify_generator_async
from .symmetry.prolongation import builtin_generator, load_ansatz_file
from .symmetry.verify import GroupAction, group_action_test
from .utils import parse_grid, parse_tolerances, parse_vector

logger = logging.getLogger(__name__)

Command = Literal["verify", "geometry", "symmetry", "export"]
OutputFormat = Literal["csv", "json", "gnuplot"]

TOLERANCE_SETTINGS = {
    "first_order": "FIRST_ORDER_TOL",
    "second_order": "SECOND_ORDER_TOL",
    "cyclic": "CYCLIC_TOL",
    "phi": "PHI_TOL",
    "curvature": "CURVATURE_TOL",
}

# actions checked by `symmetry --spec` when no transform flag is given
DEFAULT_ACTIONS = (
    GroupAction(kind="translate", vector=(1.0, -2.0, 0.5)),
    GroupAction(kind="dilate_x", factor=3.0),
    GroupAction(kind="dilate_l", factor=2.0),
)

_cache: Optional[NetCache] = NetCache(ttl=settings.CACHE_TTL) if settings.ENABLE_CACHE else None


class RunConfig(BaseModel):
    """Validated configuration of one CLI run."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    spec: Optional[Path] = None
    ansatz: Optional[Path] = None
    grid: tuple[int, int, int] = Field(default_factory=lambda: (settings.GRID_POINTS,) * 3)
    tolerances: dict[str, float] = Field(default_factory=dict)
    out: Optional[Path] = None
    format: OutputFormat = "json"
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2**64)
    levels: int = Field(default=5, ge=1)
    transform: Optional[TransformSpec] = None
    use_cache: bool = True

    @field_validator("grid")
    @classmethod
    def _grid_counts(cls, v):
        if any(n < 3 for n in v):
            raise ValueError(f"grid counts must be >= 3, got {'x'.join(map(str, v))}")
        return v

    @field_validator("tolerances")
    @classmethod
    def _known_tolerances(cls, v):
        for name, value in v.items():
            if name not in TOLERANCE_SETTINGS:
                raise ValueError(f"unknown tolerance {name!r} (known: {', '.join(TOLERANCE_SETTINGS)})")
            if not value > 0:
                raise ValueError(f"tolerance {name} must be > 0, got {value}")
        return v

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        fields = {
            "command": args.command,
            "spec": args.spec,
            "ansatz": args.ansatz,
            "tolerances": parse_tolerances(args.tol or []),
            "out": args.out,
            "format": args.format,
            "levels": args.levels,
            "use_cache": not args.no_cache,
        }
        if args.grid is not None:
            fields["grid"] = parse_grid(args.grid)
        if args.seed is not None:
            fields["seed"] = args.seed
        try:
            if args.translate is not None or args.dilate_x is not None or args.dilate_l is not None:
                fields["transform"] = TransformSpec(
                    translate=None if args.translate is None else parse_vector(args.translate),
                    dilate_x=args.dilate_x,
                    dilate_l=args.dilate_l,
                )
            return cls(**fields)
        except ValidationError as e:
            raise ConfigError(f"Invalid run configuration: {e}") from e

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, getattr(settings, TOLERANCE_SETTINGS[name]))

    def first_order_tolerance(self, net: GuichardNet) -> float:
        """Explicit ``--tol first_order`` or the default for the net's derivative mode."""
        return self.tolerances.get("first_order", default_first_order_tol(net))

    def header(self, raw_spec: Optional[dict]) -> dict:
        """Run metadata written at the top of every report."""
        return {
            "tool": "guichard-lab",
            "version": __version__,
            "command": self.command,
            "seed": self.seed,
            "grid": list(self.grid),
            "tolerances": {name: self.tolerance(name) for name in TOLERANCE_SETTINGS},
            "spec": raw_spec,
        }

    def group_actions(self) -> list[GroupAction]:
        t = self.transform
        if t is None:
            return list(DEFAULT_ACTIONS)
        try:
            actions = []
            if t.translate is not None:
                actions.append(GroupAction(kind="translate", vector=t.translate))
            if t.dilate_x is not None:
                actions.append(GroupAction(kind="dilate_x", factor=t.dilate_x))
            if t.dilate_l is not None:
                actions.append(GroupAction(kind="dilate_l", factor=t.dilate_l))
        except ValidationError as e:
            raise ConfigError(f"Invalid group action: {e}") from e
        return actions


def load_net(config: RunConfig, apply_transform: bool = True) -> tuple[GuichardNet, dict]:
    """Build (or fetch from the cache) the net of ``config.spec``.

    Transform flags replace the spec's own ``transform`` entry when ``apply_transform``.
    """
    if config.spec is None:
        raise ConfigError(f"'{config.command}' needs --spec")
    spec, raw = load_family_spec(config.spec)
    if apply_transform and config.transform is not None:
        spec = spec.model_copy(update={"transform": config.transform})
        raw = {**raw, "transform": config.transform.model_dump(exclude_none=True)}
    elif not apply_transform:
        spec = spec.model_copy(update={"transform": None})
        raw = {k: v for k, v in raw.items() if k != "transform"}

    if config.use_cache and _cache is not None:
        cached = _cache.get(raw)
        if cached is not None:
            logger.info("Using cached net")
            return cached, raw
    with get_monitor().measure(f"build.{spec.type}"):
        net = build_net(spec)
    if config.use_cache and _cache is not None:
        _cache.set(raw, net)
    return net, raw


def _residual_rows(report: ResidualReport) -> list[list]:
    data = report.to_json_dict()
    return [
        [report.kind, e["family"], e["max_abs"], e["mean_abs"], e["pass"], *e["worst_point"]]
        for e in data["entries"]
    ]


def _print_banner(title: str, lines: Sequence[str]) -> None:
    print("\n" + "=" * 80)
    print(f"[{title}]")
    print("=" * 80)
    for line in lines:
        print(line)
    print("=" * 80)


async def cmd_verify(config: RunConfig) -> int:
    """First- and second-order residuals of the spec's net; exit 2 when either fails."""
    net, raw = load_net(config)
    grid = net.domain.grid(config.grid)
    first = first_order_residuals(net, grid, config.first_order_tolerance(net))
    second = second_order_residuals(net, grid, config.tolerance("second_order"))
    passed = first.passed and second.passed

    if config.format == "json":
        text = json_text(
            {
                "header": config.header(raw),
                "pass": passed,
                "first_order": first.to_json_dict(),
                "second_order": second.to_json_dict(),
            }
        )
    else:
        columns = ["kind", "family", "max_abs", "mean_abs", "pass", "x1", "x2", "x3"]
        rows = _residual_rows(first) + _residual_rows(second)
        text = csv_text(columns, rows) if config.format == "csv" else gnuplot_text(columns, rows, config.header(raw))
    write_text(text, config.out)

    if config.out is not None:
        _print_banner(
            "VERIFY",
            [f"  {r.kind:<13} {e.family:<3} max {e.max_abs:.3e}  {'pass' if e.passed else 'FAIL'}" for r in (first, second) for e in r.entries],
        )
    return 0 if passed else 2


def _xi_interval(net: GuichardNet, inv: TranslationInvariant) -> tuple[float, float]:
    values = [inv.xi(c) for c in net.domain.corners()]
    lo, hi = min(values), max(values)
    if inv.xi_range is not None:
        lo, hi = max(lo, inv.xi_range[0]), min(hi, inv.xi_range[1])
    pad = settings.GRID_INSET * (hi - lo)
    return lo + pad, hi - pad


def _level_sets(net: GuichardNet, config: RunConfig) -> list[dict]:
    inv = net.invariant
    if not isinstance(inv, TranslationInvariant):
        return []
    lo, hi = _xi_interval(net, inv)
    out = []
    for n, xi0 in enumerate(np.linspace(lo, hi, config.levels)):
        summary = level_set_summary(net, float(xi0), seed=config.seed + n)
        out.append(summary.model_dump())
    return out


async def cmd_geometry(config: RunConfig) -> int:
    """Curvature table, level-set parallelism table and cyclicity report."""
    net, raw = load_net(config)
    grid = net.domain.grid(config.grid)
    with get_monitor().measure("geometry.curvature"):
        rows = []
        for p in grid:
            k = curvature_row(net, p)
            rows.append([*map(float, p), *k, float(sum(k))])
    max_sum = max(abs(r[-1]) for r in rows)
    level_sets = _level_sets(net, config)
    cyclicity = cyclicity_check(net, tol=config.tolerance("cyclic"))
    logger.info(f"Curvature table: {len(rows)} rows, max |K1+K2+K3| = {max_sum:.3e}")

    header = config.header(raw)
    if config.format == "json":
        write_text(
            json_text(
                {
                    "header": header,
                    "curvature": {"columns": ["x1", "x2", "x3", "K1", "K2", "K3", "sum"], "rows": rows},
                    "max_abs_sum": max_sum,
                    "level_sets": level_sets,
                    "cyclicity": cyclicity.model_dump(),
                }
            ),
            config.out,
        )
    elif config.format == "csv":
        write_text(csv_text(["x1", "x2", "x3", "K1", "K2", "K3", "sum"], rows), config.out)
        level_columns = ["xi", "points", "grad_norm", "grad_norm_variance", "mean_curvature", "mean_curvature_variance"]
        level_text = csv_text(level_columns, [[s[c] for c in level_columns] for s in level_sets])
        cyc_text = json_text(cyclicity.model_dump())
        if config.out is None:
            write_text(level_text, None)
            write_text(cyc_text, None)
        else:
            write_text(level_text, config.out.with_name(config.out.stem + "_levels.csv"))
            write_text(cyc_text, config.out.with_name(config.out.stem + "_cyclicity.json"))
    else:
        write_text(_gnuplot_curvature(net, rows, header, config), config.out)

    if config.out is not None:
        _print_banner(
            "GEOMETRY",
            [
                f"  max |K1+K2+K3|: {max_sum:.3e}",
                f"  level sets: {len(level_sets)}",
                f"  cyclicity: {cyclicity.classification or 'no claim'}",
            ],
        )
    return 0


def _gnuplot_curvature(net: GuichardNet, rows: list[list], header: dict, config: RunConfig) -> str:
    inv = net.invariant
    if not isinstance(inv, TranslationInvariant):
        table = [[*r[:3], *net.l(r[:3]), *r[3:6]] for r in rows]
        return gnuplot_text(["x1", "x2", "x3", "l1", "l2", "l3", "K1", "K2", "K3"], table, header)
    lo, hi = _xi_interval(net, inv)
    table = []
    for xi in np.linspace(lo, hi, 10 * max(config.grid) + 1):
        l, lp = inv.profile(float(xi))
        k = curvatures_from(l, np.outer(lp, inv.alpha))
        table.append([float(xi), *map(float, l), *map(float, k)])
    return gnuplot_text(["xi", "l1", "l2", "l3", "K1", "K2", "K3"], table, header)


async def cmd_symmetry(config: RunConfig) -> int:
    """Symbolic check of the built-in (or ansatz) field, plus group actions when a spec is given."""
    v = load_ansatz_file(config.ansatz) if config.ansatz is not None else builtin_generator()
    report = await verify_generator_async(v)
    passed = report.passed
    data: dict = {"symmetry": report.to_json_dict()}

    lines = [f"  ({fam}) zero: {str(ok).lower()}" for fam, ok in report.families.items()]
    raw = None
    if config.spec is not None:
        net, raw = load_net(config, apply_transform=False)
        actions = []
        for action in config.group_actions():
            r = group_action_test(net, action, tol=config.first_order_tolerance(net), counts=config.grid)
            actions.append({"action": action.model_dump(exclude_none=True), **r.to_json_dict()})
            lines.append(f"  {action.label():<24} {'pass' if r.passed else 'FAIL'}")
            passed = passed and r.passed
        data["group_actions"] = actions
    data["header"] = config.header(raw)
    data["pass"] = passed

    _print_banner(f"SYMMETRY: {v.name}", lines)
    if config.out is not None:
        write_text(json_text(data), config.out)
    return 0 if passed else 2


async def cmd_export(config: RunConfig) -> int:
    """Sampled net (x1, x2, x3, l1, l2, l3) on the grid."""
    net, raw = load_net(config)
    columns = ["x1", "x2", "x3", "l1", "l2", "l3"]
    rows = [[*map(float, p), *map(float, net.l(p))] for p in net.domain.grid(config.grid)]
    header = config.header(raw)
    if config.format == "json":
        text = json_text({"header": header, "columns": columns, "rows": rows})
    elif config.format == "csv":
        text = csv_text(columns, rows)
    else:
        text = gnuplot_text(columns, rows, header)
    write_text(text, config.out)
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "geometry": cmd_geometry,
    "symmetry": cmd_symmetry,
    "export": cmd_export,
}


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="main.py",
        description="Guichard Lab - invariant solutions, geometry and symmetries of Lame's system",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Residuals of a family against the first- and second-order systems
  python main.py verify --spec specs/elliptic.json --out report.json

  # Curvatures, level surfaces and cyclicity as CSV
  python main.py geometry --spec specs/elliptic.json --format csv --out curvature.csv

  # Symbolic symmetry check of the built-in generator, plus group actions on a family
  python main.py symmetry --spec specs/elliptic.json

  # Symmetry check of a user field (unassigned components keep the built-in ones)
  python main.py symmetry --ansatz field.txt

  # Sample a translated copy of a family for gnuplot
  python main.py export --spec specs/elliptic.json --translate 1,-2,0.5 --format gnuplot
        """,
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="What to run")
    parser.add_argument("--spec", type=Path, help="Family spec (JSON)")
    parser.add_argument("--ansatz", type=Path, help="Vector field in the symmetry grammar (symmetry only)")
    parser.add_argument("--out", type=Path, help="Output path (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json", "gnuplot"], default="json", help="Output format (default: json)")
    parser.add_argument("--tol", action="append", metavar="NAME=VALUE", help="Tolerance override, repeatable")
    parser.add_argument("--grid", metavar="N1xN2xN3", help=f"Samples per axis (default: {settings.GRID_POINTS})")
    parser.add_argument("--seed", type=int, help=f"Seed for level-set sampling (default: {settings.DEFAULT_SEED})")
    parser.add_argument("--levels", type=int, default=5, help="Level surfaces sampled by geometry (default: 5)")
    parser.add_argument("--translate", metavar="X,Y,Z", help="Translate the net by a vector")
    parser.add_argument("--dilate-x", type=float, help="Dilate the independent variables")
    parser.add_argument("--dilate-l", type=float, help="Dilate the metric coefficients")
    parser.add_argument("--no-cache", action="store_true", help="Disable the net cache")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--stats", action="store_true", help="Print timings after the run")
    return parser


def print_stats() -> None:
    print("\n[STATS]")
    for op, stats in get_monitor().get_all_stats().items():
        print(f"  {op}: {stats['count']}x, total {stats['total']:.3f}s, avg {stats['avg']:.3f}s")
    print(f"  Cached nets: {_cache.size() if _cache else 0}")


async def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        config = RunConfig.from_args(args)
        code = await COMMANDS[config.command](config)
    except LabError as e:
        logger.error(f"{args.command} failed: {e}")
        code = e.exit_code
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        code = 1
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        code = 1

    if args.stats:
        print_stats()
    return code
