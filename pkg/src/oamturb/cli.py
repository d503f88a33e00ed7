"""Command-line front end: figures, sweeps, peaks, scaling fits, MC checks.

Exit codes: 0 success; 2 quadrature refinement did not converge;
3 invalid configuration or arguments; 4 Monte Carlo and quadrature
disagree beyond 3 standard errors.

Every CSV artifact carries the header ``w0_over_r0,value,raw,channel,
delta_l`` and floats formatted with repr, so identical inputs yield
byte-identical output and values round-trip exactly.  Options may come
from a JSON config file (``--config``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .phase_screen_mc import GridTooCoarse, mc_joint_probability
from .probabilities import (
    ChannelSpec,
    DegenerateBaseline,
    DegenerateFit,
    InvalidChannel,
    NoInteriorPeak,
    ProbabilityPoint,
    family_baseline,
    find_peak,
    normalize_family,
    peak_scaling,
    probability,
)
from .quadrature import NonConvergence, QuadratureConfig
from .svg_plot import LineSeries, render_line_chart, write_svg

EXIT_OK = 0
EXIT_NONCONVERGENCE = 2
EXIT_BAD_CONFIG = 3
EXIT_MC_MISMATCH = 4

CSV_HEADER = "w0_over_r0,value,raw,channel,delta_l"

PANEL_IDS = ("1a", "1b", "1c", "1d", "2a", "2b", "3a", "3b")

# figure artifacts trade the library's 1e-6 default for plot-grade
# accuracy: strong-turbulence points at the top of the grid would
# otherwise refine for minutes each.  Peak hunts tolerate an even
# lighter grid (locations move by < 1e-3).
FIGURE_SWEEP_CONFIG = QuadratureConfig(
    radial_nodes=160, angular_nodes=256, rel_tolerance=5e-4, max_refinements=2
)
PEAK_SCAN_CONFIG = QuadratureConfig(
    radial_nodes=128, angular_nodes=192, rel_tolerance=1e-4, max_refinements=3
)

_QUAD_KEYS = ("radial_nodes", "angular_nodes", "rel_tol", "max_refinements")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the contract here says 3."""

    def error(self, message):
        self.exit(EXIT_BAD_CONFIG, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return repr(float(x))


def _csv_text(points) -> str:
    lines = [CSV_HEADER]
    for pt in points:
        lines.append(
            f"{_fmt(pt.w0_over_r0)},{_fmt(pt.value)},{_fmt(pt.raw)},"
            f"{pt.channel.label()},{pt.delta_l}"
        )
    return "\n".join(lines) + "\n"


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be LO:HI:COUNT, got {text!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 2:
        raise ValueError(f"grid count must be >= 2, got {count}")
    if not (0.0 <= lo < hi) or not math.isfinite(hi):
        raise ValueError(f"grid range must satisfy 0 <= LO < HI, got {text!r}")
    return [float(v) for v in np.linspace(lo, hi, count)]


def _parse_bracket(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"bracket must be LO:HI, got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_r0(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    value = float(text)
    if not (value > 0.0):
        raise ValueError(f"r0 must be positive or inf, got {text!r}")
    return value


def _merge_config(args: argparse.Namespace, parser: _Parser) -> argparse.Namespace:
    """Fill unset options from the JSON config file; flags win."""
    if not getattr(args, "config", None):
        return args
    try:
        loaded = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(loaded, dict):
        parser.error(f"config {args.config} must hold a JSON object")
    known = vars(args)
    for key, value in loaded.items():
        attr = key.replace("-", "_")
        if attr not in known or attr in ("config", "command"):
            parser.error(f"unknown config key {key!r}")
        if known[attr] is None:
            setattr(args, attr, value)
    return args


def _quad_config(args, base: QuadratureConfig) -> QuadratureConfig:
    return QuadratureConfig(
        radial_nodes=int(args.radial_nodes or base.radial_nodes),
        angular_nodes=int(args.angular_nodes or base.angular_nodes),
        r_max_factor=base.r_max_factor,
        rel_tolerance=float(args.rel_tol or base.rel_tolerance),
        max_refinements=int(
            base.max_refinements if args.max_refinements is None else args.max_refinements
        ),
    )


def _jobs(args) -> int:
    if getattr(args, "jobs", None):
        return max(1, int(args.jobs))
    return min(8, os.cpu_count() or 1)


def _sweep_points(ch: ChannelSpec, ratios, cfg: QuadratureConfig, jobs: int):
    """Normalized curve over explicit ratios, evaluated concurrently."""
    baseline = family_baseline(ch, None, cfg)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        raws = list(pool.map(lambda t: probability(ch, t, None, cfg), ratios))
    points = [
        ProbabilityPoint(t, math.nan, raw, ch, ch.delta_l)
        for t, raw in zip(ratios, raws)
    ]
    return normalize_family(points, baseline)


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of one command invocation's inputs."""

    channel: ChannelSpec
    grid: tuple
    quad: QuadratureConfig
    n_screens: int = 0
    seed: int | None = None
    n_grid: int = 256
    out: str | None = None


def _build_channel(args) -> ChannelSpec:
    kind = args.kind
    if kind is None:
        raise ValueError("--kind is required")
    l0 = int(args.l0 if args.l0 is not None else 0)
    p0 = int(args.p0 if args.p0 is not None else 0)
    if args.l1 is None:
        raise ValueError("--l1 is required")
    l1 = int(args.l1)
    if kind == "joint":
        if args.l2 is None:
            raise ValueError("--l2 is required for joint channels")
        return ChannelSpec.joint(l0, l1, int(args.l2), p0)
    if args.l2 is not None:
        raise ValueError(f"--l2 is only meaningful for joint channels, not {kind}")
    if kind == "single":
        return ChannelSpec.single(l0, l1, p0)
    return ChannelSpec.signal(l0, l1, p0)


def cmd_sweep(args) -> int:
    ch = _build_channel(args)
    grid = _parse_grid(args.grid) if args.grid else None
    if grid is None:
        raise ValueError("--grid is required")
    cfg = _quad_config(args, FIGURE_SWEEP_CONFIG)
    if args.r0 is not None:
        ratio = 0.0 if math.isinf(_parse_r0(str(args.r0))) else 1.0 / _parse_r0(str(args.r0))
        ratios = [ratio] * len(grid)
    else:
        ratios = grid
    points = _sweep_points(ch, ratios, cfg, _jobs(args))
    text = _csv_text(points)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _peak_channel(kind: str, l0: int, delta_l: int, p0: int) -> ChannelSpec:
    if kind == "single":
        return ChannelSpec.single(l0, l0 + delta_l, p0)
    if kind == "joint":
        return ChannelSpec.joint(l0, delta_l, l0, p0)
    return ChannelSpec.signal(l0, l0 + delta_l, p0)


def cmd_peak(args) -> int:
    if args.delta_l is None:
        raise ValueError("--delta-l is required")
    kind = args.kind or "single"
    l0 = int(args.l0 if args.l0 is not None else 0)
    p0 = int(args.p0 if args.p0 is not None else 0)
    ch = _peak_channel(kind, l0, int(args.delta_l), p0)
    bracket = _parse_bracket(args.bracket) if args.bracket else (0.02, 3.0)
    cfg = _quad_config(args, PEAK_SCAN_CONFIG)
    pk = find_peak(ch, bracket, None, cfg)
    report = (
        f"channel={ch.label()}\n"
        f"delta_l={pk.delta_l}\n"
        f"w0_over_r0_max={_fmt(pk.w0_over_r0_max)}\n"
        f"peak_value={_fmt(pk.peak_value)}\n"
        f"half_max_width={_fmt(pk.half_max_width)}\n"
    )
    sys.stdout.write(report)
    if args.out:
        baseline = family_baseline(ch, None, cfg)
        pt = ProbabilityPoint(
            pk.w0_over_r0_max, pk.peak_value, pk.peak_value * baseline, ch, pk.delta_l
        )
        Path(args.out).write_text(_csv_text([pt]))
    return EXIT_OK


def cmd_scaling(args) -> int:
    if args.family is None:
        raise ValueError("--family is required")
    dmax = int(args.delta_l_max if args.delta_l_max is not None else 4)
    if dmax < 2:
        raise ValueError(f"--delta-l-max must be >= 2, got {dmax}")
    l0 = int(args.l0 if args.l0 is not None else 0)
    bracket = _parse_bracket(args.bracket) if args.bracket else (0.02, 3.0)
    cfg = _quad_config(args, PEAK_SCAN_CONFIG)
    fit = peak_scaling(args.family, l0, range(1, dmax + 1), None, cfg, bracket)
    lines = [f"family={fit.family}", f"l0={fit.l0}"]
    for pk in fit.peaks:
        lines.append(f"delta_l={pk.delta_l} w0_over_r0_max={_fmt(pk.w0_over_r0_max)}")
    lines += [
        f"slope={_fmt(fit.slope)}",
        f"intercept={_fmt(fit.intercept)}",
        f"max_residual={_fmt(fit.max_residual)}",
        f"rel_max_residual={_fmt(fit.rel_max_residual)}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        points = []
        for pk in fit.peaks:
            baseline = family_baseline(pk.channel, None, cfg)
            points.append(
                ProbabilityPoint(
                    pk.w0_over_r0_max,
                    pk.peak_value,
                    pk.peak_value * baseline,
                    pk.channel,
                    pk.delta_l,
                )
            )
        Path(args.out).write_text(_csv_text(points))
    return EXIT_OK


def cmd_validate_mc(args) -> int:
    if args.seed is None:
        raise ValueError("--seed is required for Monte Carlo commands")
    ratio = float(args.w0_over_r0 if args.w0_over_r0 is not None else 1.0)
    if not (ratio > 0.0) or not math.isfinite(ratio):
        raise ValueError("Monte Carlo validation requires finite positive w0/r0")
    if args.r0 is not None and math.isinf(_parse_r0(str(args.r0))):
        raise ValueError("Monte Carlo validation requires finite r0")
    l0 = int(args.l0 if args.l0 is not None else 0)
    p0 = int(args.p0 if args.p0 is not None else 0)
    l1 = int(args.l1 if args.l1 is not None else 0)
    l2 = int(args.l2 if args.l2 is not None else 0)
    ch = ChannelSpec.joint(l0, l1, l2, p0)
    n_screens = int(args.n_screens if args.n_screens is not None else 500)
    n_grid = int(args.n_grid if args.n_grid is not None else 256)
    cfg = _quad_config(args, QuadratureConfig())

    quad = probability(ch, ratio, None, cfg) / family_baseline(ch, None, cfg)
    est = mc_joint_probability(ch, ratio, n_screens, int(args.seed), n_grid)
    z = abs(quad - est.mean) / est.stderr if est.stderr > 0.0 else 0.0
    sys.stdout.write(
        f"channel={ch.label()}\n"
        f"w0_over_r0={_fmt(ratio)}\n"
        f"quadrature={_fmt(quad)}\n"
        f"mc_mean={_fmt(est.mean)} mc_stderr={_fmt(est.stderr)} n_screens={est.n_screens}\n"
        f"z={_fmt(z)}\n"
    )
    return EXIT_OK if z < 3.0 else EXIT_MC_MISMATCH


def _figure_grid():
    ratios = [0.0] + [float(v) for v in np.linspace(0.05, 4.0, 41)[1:]]
    return ratios


_STYLES = ("solid", "dashed", "dotted", "solid")
_MARKERS = ("circle", "square", "diamond", "triangle")


def _panel_curves(panel: str):
    """Channel list and per-curve slugs/labels for each figure panel."""
    if panel == "1a":
        return [(f"l0_{k}", f"l0=l={k}", ChannelSpec.single(k, k)) for k in (0, 1, 2)]
    if panel == "1b":
        return [(f"l0_{k}", f"l0=l2={k} l1=0", ChannelSpec.joint(k, 0, k)) for k in (0, 1, 2)]
    if panel == "1c":
        return [(f"absl_{k}", f"|l|={k}", ChannelSpec.joint(0, k, -k)) for k in (0, 1, 2)]
    if panel == "1d":
        return [(f"l0_{k}", f"l0=l1={k}", ChannelSpec.signal(k, k)) for k in (0, 1, 2)]
    if panel == "2a":
        return [(f"dl_{d}", f"delta_l={d}", ChannelSpec.single(0, d)) for d in (1, 2, 3)]
    if panel == "2b":
        return [(f"dl_{d}", f"delta_l={d}", ChannelSpec.joint(0, d, 0)) for d in (1, 2, 3)]
    raise ValueError(f"unknown panel {panel!r}")


def _figure_sweep_panel(panel: str, out_dir: Path, cfg: QuadratureConfig, jobs: int):
    curves = _panel_curves(panel)
    grid = _figure_grid()
    results = [(slug, label, _sweep_points(ch, grid, cfg, jobs)) for slug, label, ch in curves]

    written = []
    try:
        for slug, _, points in results:
            path = out_dir / f"fig{panel}_{slug}.csv"
            path.write_text(_csv_text(points))
            written.append(path)
    except OSError:
        for path in written:
            path.unlink(missing_ok=True)
        raise

    series = [
        LineSeries(
            x=[pt.w0_over_r0 for pt in points],
            y=[pt.value for pt in points],
            label=label,
            style=_STYLES[k % len(_STYLES)],
        )
        for k, (_, label, points) in enumerate(results)
    ]
    _emit_svg(out_dir / f"fig{panel}.svg", series, panel, "w0 / r0", "normalized probability")
    return written


def _figure_peak_panel(panel: str, out_dir: Path, cfg: QuadratureConfig, jobs: int):
    family = "single" if panel == "3a" else "joint"
    delta_ls = (1, 2, 3, 4)
    l0s = (0, 1, 2, 3)

    def one_series(l0):
        fit = peak_scaling(family, l0, delta_ls, None, cfg)
        points = []
        for pk in fit.peaks:
            baseline = family_baseline(pk.channel, None, cfg)
            points.append(
                ProbabilityPoint(
                    pk.w0_over_r0_max,
                    pk.peak_value,
                    pk.peak_value * baseline,
                    pk.channel,
                    pk.delta_l,
                )
            )
        return points

    with ThreadPoolExecutor(max_workers=min(jobs, len(l0s))) as pool:
        all_points = list(pool.map(one_series, l0s))

    written = []
    try:
        for l0, points in zip(l0s, all_points):
            path = out_dir / f"fig{panel}_series_l0_{l0}.csv"
            path.write_text(_csv_text(points))
            written.append(path)
    except OSError:
        for path in written:
            path.unlink(missing_ok=True)
        raise

    label_key = "l0" if family == "single" else "l0=l2"
    series = [
        LineSeries(
            x=[pt.delta_l for pt in points],
            y=[pt.w0_over_r0 for pt in points],
            label=f"{label_key}={l0}",
            marker=_MARKERS[k % len(_MARKERS)],
        )
        for k, (l0, points) in enumerate(zip(l0s, all_points))
    ]
    _emit_svg(out_dir / f"fig{panel}.svg", series, panel, "delta_l", "(w0/r0)_max")
    return written


def _emit_svg(path: Path, series, panel: str, x_label: str, y_label: str):
    # plots are derived artifacts; a failure here must not disturb CSVs
    try:
        write_svg(path, render_line_chart(series, f"panel {panel}", x_label, y_label))
    except Exception as exc:  # noqa: BLE001
        print(f"warning: SVG emission failed for {path}: {exc}", file=sys.stderr)


def cmd_figure(args) -> int:
    panel = args.panel
    out_dir = Path(args.out or "figures")
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = _jobs(args)
    if panel in ("3a", "3b"):
        cfg = _quad_config(args, PEAK_SCAN_CONFIG)
        _figure_peak_panel(panel, out_dir, cfg, jobs)
    else:
        cfg = _quad_config(args, FIGURE_SWEEP_CONFIG)
        _figure_sweep_panel(panel, out_dir, cfg, jobs)
    return EXIT_OK


def _add_quad_options(sub):
    sub.add_argument("--radial-nodes", type=int, default=None)
    sub.add_argument("--angular-nodes", type=int, default=None)
    sub.add_argument("--rel-tol", type=float, default=None)
    sub.add_argument("--max-refinements", type=int, default=None)
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("--config", default=None, help="JSON file with default option values")


def build_parser() -> _Parser:
    parser = _Parser(prog="oam-turb", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    fig = subs.add_parser("figure", parents=[], help="reproduce a figure panel")
    fig.add_argument("panel", choices=PANEL_IDS)
    fig.add_argument("--out", default=None, help="output directory (default figures/)")
    _add_quad_options(fig)

    sw = subs.add_parser("sweep", help="probability curve over a w0/r0 grid, CSV out")
    sw.add_argument("--kind", choices=("single", "joint", "signal"), default=None)
    sw.add_argument("--l0", type=int, default=None)
    sw.add_argument("--p0", type=int, default=None)
    sw.add_argument("--l1", type=int, default=None, help="detected OAM (signal side)")
    sw.add_argument("--l2", type=int, default=None, help="idler OAM, joint channels only")
    sw.add_argument("--grid", default=None, help="LO:HI:COUNT of w0/r0 values")
    sw.add_argument("--r0", default=None, help="override Fried parameter; 'inf' allowed")
    sw.add_argument("--out", default=None, help="CSV path (default stdout)")
    _add_quad_options(sw)

    pk = subs.add_parser("peak", help="locate the interior maximum of a mismatch curve")
    pk.add_argument("--kind", choices=("single", "joint", "signal"), default=None)
    pk.add_argument("--l0", type=int, default=None)
    pk.add_argument("--p0", type=int, default=None)
    pk.add_argument("--delta-l", type=int, default=None)
    pk.add_argument("--bracket", default=None, help="LO:HI search range (default 0.02:3.0)")
    pk.add_argument("--out", default=None, help="optional CSV with the peak row")
    _add_quad_options(pk)

    sc = subs.add_parser("scaling", help="fit peak location against momentum mismatch")
    sc.add_argument("--family", choices=("single", "joint"), default=None)
    sc.add_argument("--l0", type=int, default=None)
    sc.add_argument("--delta-l-max", type=int, default=None)
    sc.add_argument("--bracket", default=None)
    sc.add_argument("--out", default=None, help="optional CSV with one row per peak")
    _add_quad_options(sc)

    mc = subs.add_parser("validate-mc", help="cross-check quadrature against phase screens")
    mc.add_argument("--l0", type=int, default=None)
    mc.add_argument("--p0", type=int, default=None)
    mc.add_argument("--l1", type=int, default=None)
    mc.add_argument("--l2", type=int, default=None)
    mc.add_argument("--w0-over-r0", type=float, default=None)
    mc.add_argument("--r0", default=None, help="must be finite here; 'inf' is rejected")
    mc.add_argument("--n-screens", type=int, default=None)
    mc.add_argument("--n-grid", type=int, default=None)
    mc.add_argument("--seed", type=int, default=None, required=False)
    _add_quad_options(mc)

    return parser


_COMMANDS = {
    "figure": cmd_figure,
    "sweep": cmd_sweep,
    "peak": cmd_peak,
    "scaling": cmd_scaling,
    "validate-mc": cmd_validate_mc,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args = _merge_config(args, parser)
    try:
        return _COMMANDS[args.command](args)
    except NonConvergence as exc:
        print(f"oam-turb: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (
        ValueError,
        InvalidChannel,
        NoInteriorPeak,
        DegenerateBaseline,
        DegenerateFit,
        GridTooCoarse,
    ) as exc:
        print(f"oam-turb: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
