"""Phase-screen sanity checks: statistics, then a quadrature cross-check.

Two independent routes compute the same entangled-pair probability: the
deterministic coherence-kernel integral and the phase-screen ensemble
average.  This script first verifies the screens reproduce the 5/3
structure function over the inertial range, then compares the routes on
one channel and reports the disagreement in standard errors.
"""

from pathlib import Path

from oamturb import (
    ChannelSpec,
    QuadratureConfig,
    TurbulenceParams,
    empirical_structure_function,
    generate_screen,
    mc_joint_probability,
    normalized_probability,
    structure_function,
)
from oamturb.svg_plot import LineSeries, render_line_chart, write_svg

OUT_DIR = Path("demo_output")
OUT_DIR.mkdir(exist_ok=True)

N_SCREENS = 150
N_GRID = 256
EXTENT = 16.0
SEPARATIONS = [0.25, 0.5, 1.0, 2.0]


def structure_function_table() -> None:
    tp = TurbulenceParams(r0=1.0)
    screens = [generate_screen(tp, N_GRID, EXTENT, seed) for seed in range(N_SCREENS)]
    pairs = empirical_structure_function(screens, SEPARATIONS)
    xs, ratios = [], []
    print("  d        measured   analytic   ratio")
    for d, measured in pairs:
        analytic = structure_function(d, tp)
        xs.append(d)
        ratios.append(measured / analytic)
        print(f"  {d:6.3f}  {measured:9.4f}  {analytic:9.4f}  {measured / analytic:.3f}")
    svg = render_line_chart(
        [LineSeries(x=xs, y=ratios, label="measured / analytic", marker="circle")],
        title=f"Structure-function ratio over {N_SCREENS} screens",
        x_label="separation d",
        y_label="ratio",
    )
    write_svg(OUT_DIR / "structure_function_ratio.svg", svg)
    print(f"  wrote {OUT_DIR / 'structure_function_ratio.svg'}")


def route_comparison() -> None:
    ch = ChannelSpec.joint(0, 0, 0)
    t = 1.0
    cfg = QuadratureConfig(radial_nodes=96, angular_nodes=144, rel_tolerance=1e-4, max_refinements=2)
    quad = normalized_probability(ch, t, cfg=cfg)
    mc = mc_joint_probability(ch, t, n_screens=300, seed=42, n_grid=128)
    z = abs(mc.mean - quad) / mc.stderr
    print(f"  channel {ch.label()} at w0/r0 = {t}")
    print(f"  quadrature   {quad:.6f}")
    print(f"  monte carlo  {mc.mean:.6f} +/- {mc.stderr:.6f} ({mc.n_screens} screens)")
    print(f"  disagreement {z:.2f} standard errors")


def main() -> None:
    print(f"Measuring the structure function ({N_SCREENS} screens, grid {N_GRID})...")
    structure_function_table()
    print("Cross-checking the two probability routes...")
    route_comparison()


if __name__ == "__main__":
    main()
