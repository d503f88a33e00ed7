"""Plot a gallery of LG radial profiles and check their orthonormality.

Writes demo_output/mode_gallery.svg and prints the worst pairwise
orthonormality defect over a small index grid.
"""

from pathlib import Path

import numpy as np

from oamturb import (
    LGModeSpec,
    QuadratureConfig,
    radial_amplitude,
    radial_orthonormality_defect,
)
from oamturb.svg_plot import LineSeries, render_line_chart, write_svg

OUT_DIR = Path("demo_output")
OUT_DIR.mkdir(exist_ok=True)

W0 = 1.0
PROFILE_MODES = [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1)]


def profile_chart() -> None:
    r = np.linspace(0.0, 3.5 * W0, 400)
    series = []
    for l, p in PROFILE_MODES:
        spec = LGModeSpec.of(l, p, W0)
        series.append(
            LineSeries(
                x=r.tolist(),
                y=radial_amplitude(spec, r).tolist(),
                label=f"l={l} p={p}",
            )
        )
    svg = render_line_chart(
        series,
        title="LG radial amplitudes at w0 = 1",
        x_label="r / w0",
        y_label="R(r)",
    )
    write_svg(OUT_DIR / "mode_gallery.svg", svg)
    print(f"  wrote {OUT_DIR / 'mode_gallery.svg'}")


def orthonormality_table() -> None:
    cfg = QuadratureConfig()
    worst = 0.0
    print("  defect of <R_p1 | R_p2> per OAM order (p1, p2 <= 2):")
    for l in range(0, 4):
        defects = [
            radial_orthonormality_defect(l, p1, p2, W0, cfg)
            for p1 in range(3)
            for p2 in range(p1, 3)
        ]
        row_worst = max(defects)
        worst = max(worst, row_worst)
        print(f"    l={l}: worst {row_worst:.3e}")
    print(f"  overall worst defect {worst:.3e}")


def main() -> None:
    print("Rendering radial profiles...")
    profile_chart()
    print("Checking orthonormality...")
    orthonormality_table()


if __name__ == "__main__":
    main()
