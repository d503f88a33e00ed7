"""Kolmogorov structure function and pairwise coherence versus separation.

Writes demo_output/coherence_curves.svg and prints the 5/3 power-law
scaling check: halving r0 must multiply the structure function by 2^(5/3).
"""

import math
from pathlib import Path

import numpy as np

from oamturb import TurbulenceParams, coherence, structure_function
from oamturb.svg_plot import LineSeries, render_line_chart, write_svg

OUT_DIR = Path("demo_output")
OUT_DIR.mkdir(exist_ok=True)

FRIED_VALUES = [0.5, 1.0, 2.0]


def coherence_chart() -> None:
    d = np.linspace(0.0, 3.0, 300)
    series = []
    for r0 in FRIED_VALUES:
        tp = TurbulenceParams(r0=r0)
        series.append(
            LineSeries(
                x=d.tolist(),
                y=coherence(d, tp).tolist(),
                label=f"r0 = {r0}",
            )
        )
    svg = render_line_chart(
        series,
        title="Pairwise coherence exp(-D(d)/2)",
        x_label="separation d",
        y_label="coherence",
    )
    write_svg(OUT_DIR / "coherence_curves.svg", svg)
    print(f"  wrote {OUT_DIR / 'coherence_curves.svg'}")


def scaling_check() -> None:
    d = 0.7
    ratio = structure_function(d, TurbulenceParams(r0=0.5)) / structure_function(
        d, TurbulenceParams(r0=1.0)
    )
    expected = 2.0 ** (5.0 / 3.0)
    print(f"  D(d; r0/2) / D(d; r0) = {ratio:.12f}")
    print(f"  2^(5/3)               = {expected:.12f}")
    print(f"  difference            = {abs(ratio - expected):.3e}")
    at_fried = structure_function(1.0, TurbulenceParams(r0=1.0))
    print(f"  D(r0) = {at_fried} (the Kolmogorov coefficient, by construction)")
    assert math.isclose(ratio, expected, rel_tol=1e-12)


def main() -> None:
    print("Rendering coherence curves...")
    coherence_chart()
    print("Power-law scaling check...")
    scaling_check()


if __name__ == "__main__":
    main()
