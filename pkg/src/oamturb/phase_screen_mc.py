"""Phase-screen Monte Carlo oracle for pair detection probabilities.

This path deliberately shares no integration code with the quadrature
modules.  Screens are synthesized by FFT spectral filtering of white
noise against the Kolmogorov phase spectrum 0.023 r0^(-5/3) f^(-11/3)
(f in cycles per unit length), plus three levels of 3x3 subharmonic
cells to restore the large-separation part of the 5/3 law that a plain
FFT grid truncates.  Each screen perturbs the discretized pump-signal-
idler overlap; both photons of the collinear pair cross the screen at
the same point, so the pair amplitude carries exp(i 2 phi).

Estimates are normalized by the same zero-turbulence reference integral
as the quadrature path, so conserving channels average to 1 at r0=inf
up to discretization error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lg_modes import LGModeSpec, radial_amplitude
from .probabilities import PAIR_PHASE_MULTIPLICITY, ChannelSpec, InvalidChannel, family_baseline
from .turbulence import KOLMOGOROV_COEFFICIENT, KOLMOGOROV_EXPONENT, TurbulenceParams

# Kolmogorov phase power spectrum constant for frequencies in cycles
# per unit length, consistent with the 6.88 structure-function constant.
SPECTRUM_CONSTANT = 0.023
SUBHARMONIC_LEVELS = 3

DEFAULT_GRID = 256
EXTENT_FACTOR = 16.0


class GridTooCoarse(RuntimeError):
    """Discretized zero-turbulence overlap deviates too far from 1."""


class SeparationOutOfRange(ValueError):
    """Requested separation has no usable pixel shift on this grid."""


@dataclass(frozen=True, eq=False)
class PhaseScreen:
    """One realization of the turbulent phase on a square grid."""

    n: int
    extent: float
    r0: float
    seed: int
    samples: np.ndarray

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 2, got {self.n}")
        if not (self.extent > 0.0):
            raise ValueError(f"extent must be positive, got {self.extent}")
        if self.samples.shape != (self.n, self.n):
            raise ValueError(f"samples shape {self.samples.shape} does not match n={self.n}")
        if not np.isfinite(self.samples).all():
            raise ValueError("screen contains non-finite phase values")


@dataclass(frozen=True)
class McEstimate:
    """Ensemble mean and its standard error over independent screens."""

    mean: float
    stderr: float
    n_screens: int

    def __post_init__(self):
        if self.stderr < 0.0:
            raise ValueError(f"stderr must be >= 0, got {self.stderr}")
        if self.n_screens < 2:
            raise ValueError(f"need at least 2 screens, got {self.n_screens}")


def _require_kolmogorov(tp: TurbulenceParams):
    if not (
        math.isclose(tp.coefficient, KOLMOGOROV_COEFFICIENT)
        and math.isclose(tp.exponent, KOLMOGOROV_EXPONENT)
    ):
        raise ValueError("screen synthesis implements the standard Kolmogorov spectrum only")


def generate_screen(tp: TurbulenceParams, n: int, extent: float, seed: int) -> PhaseScreen:
    """Synthesize one Kolmogorov phase screen.

    FFT filtering of complex white noise gives the portion of the
    spectrum at and above one cycle per extent; three subharmonic
    levels of 3x3 cells (skipping the zero-frequency center of each)
    fill in lower frequencies.  The spatial mean is removed, so the
    piston term is exactly zero.
    """
    _require_kolmogorov(tp)
    if n < 2 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 2, got {n}")
    if not (extent > 0.0):
        raise ValueError(f"extent must be positive, got {extent}")
    if math.isinf(tp.r0):
        return PhaseScreen(n, extent, tp.r0, seed, np.zeros((n, n)))

    rng = np.random.default_rng(seed)
    delta_f = 1.0 / extent
    fx = np.fft.fftfreq(n, d=extent / n)
    f = np.hypot(fx[:, None], fx[None, :])
    psd = np.zeros_like(f)
    nonzero = f > 0.0
    psd[nonzero] = SPECTRUM_CONSTANT * tp.r0 ** (-5.0 / 3.0) * f[nonzero] ** (-11.0 / 3.0)
    noise = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    coeff = noise * np.sqrt(psd) * delta_f
    screen = np.fft.ifft2(coeff).real * n * n

    x = (np.arange(n) - n // 2) * (extent / n)
    for level in range(1, SUBHARMONIC_LEVELS + 1):
        df = delta_f / 3.0**level
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                if i == 0 and j == 0:
                    continue
                fpair = np.hypot(i * df, j * df)
                sigma = math.sqrt(SPECTRUM_CONSTANT * tp.r0 ** (-5.0 / 3.0) * fpair ** (-11.0 / 3.0)) * df
                a, b = rng.standard_normal(2)
                wave = np.exp(2j * math.pi * df * (i * x[:, None] + j * x[None, :]))
                screen = screen + ((a + 1j * b) * sigma * wave).real

    # power below the deepest subharmonic cell varies so slowly across
    # the window that it reduces to a random tilt; matched per-axis
    # variance keeps the 5/3 law from sagging at large separations
    f_cut = delta_f / (2.0 * 3.0**SUBHARMONIC_LEVELS)
    tilt_var = (
        3.0 * math.pi * (2.0 * math.pi) ** 2
        * SPECTRUM_CONSTANT * tp.r0 ** (-5.0 / 3.0) * f_cut ** (1.0 / 3.0)
    )
    gx, gy = rng.standard_normal(2) * math.sqrt(tilt_var)
    screen = screen + gx * x[:, None] + gy * x[None, :]

    screen -= screen.mean()
    return PhaseScreen(n, extent, tp.r0, seed, screen)


def empirical_structure_function(screens, separations):
    """Mean-square phase increments at the requested separations.

    Averages non-wrapping differences along both grid axes over all
    positions and screens; each separation is snapped to a whole pixel
    shift, and the returned distance is the snapped one.
    """
    screens = list(screens)
    if len(screens) < 2:
        raise ValueError(f"need at least 2 screens, got {len(screens)}")
    first = screens[0]
    delta = first.extent / first.n
    out = []
    for d in separations:
        shift = round(float(d) / delta)
        if shift < 1 or shift > first.n // 2:
            raise SeparationOutOfRange(
                f"separation {d} maps to {shift} pixels; usable range is [1, {first.n // 2}]"
            )
        acc = 0.0
        count = 0
        for sc in screens:
            phi = sc.samples
            dx = phi[:, shift:] - phi[:, :-shift]
            dy = phi[shift:, :] - phi[:-shift, :]
            acc += float(np.sum(dx * dx)) + float(np.sum(dy * dy))
            count += dx.size + dy.size
        out.append((shift * delta, acc / count))
    return out


def _mode_field(l: int, p: int, w0: float, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Full complex mode profile, unit-normalized over the plane."""
    radial = radial_amplitude(LGModeSpec.of(l, p, w0), r)
    return radial * np.exp(1j * l * theta) / math.sqrt(2.0 * math.pi)


def _overlap_weight(ch: ChannelSpec, n: int, extent: float) -> np.ndarray:
    delta = extent / n
    x = (np.arange(n) - n // 2) * delta
    r = np.hypot(x[:, None], x[None, :])
    theta = np.arctan2(x[None, :], x[:, None])
    pump = _mode_field(ch.pump.l, ch.pump.p, ch.w0, r, theta)
    s1 = _mode_field(ch.signal_l, 0, ch.w0, r, theta)
    s2 = _mode_field(ch.idler_l, 0, ch.w0, r, theta)
    return pump * np.conj(s1) * np.conj(s2)


def mc_joint_probability(
    ch: ChannelSpec,
    w0_over_r0: float,
    n_screens: int,
    seed: int,
    n_grid: int = DEFAULT_GRID,
) -> McEstimate:
    """Ensemble-averaged pair detection probability from phase screens.

    Per screen, the overlap of the pump profile with the conjugated
    signal and idler modes is summed over the Cartesian grid with the
    pair phase factor exp(i 2 phi); squared moduli are averaged and
    normalized by the quadrature path's zero-turbulence reference, so
    the estimate is directly comparable to normalized joint values.
    """
    if ch.kind != "joint":
        raise InvalidChannel(f"Monte Carlo oracle covers joint channels, got {ch.kind}")
    if n_screens < 50:
        raise ValueError(f"need at least 50 screens for a usable estimate, got {n_screens}")
    if w0_over_r0 < 0.0:
        raise ValueError(f"w0_over_r0 must be >= 0, got {w0_over_r0}")
    extent = EXTENT_FACTOR * ch.w0
    if extent / n_grid > ch.w0 / 8.0:
        raise GridTooCoarse(f"{n_grid} points over {extent} leaves under 8 samples per w0")

    delta = extent / n_grid
    cell = delta * delta
    # the continuum reference; (2pi)^2 converts the polar-form integral
    # to the squared planar overlap used here
    baseline = family_baseline(ch) / (2.0 * math.pi) ** 2

    ref = _overlap_weight(ch.conserving_reference(), n_grid, extent)
    flat = abs(np.sum(ref)) * cell
    if abs(flat * flat / baseline - 1.0) > 1e-3:
        raise GridTooCoarse(
            f"zero-turbulence overlap off by {flat * flat / baseline - 1.0:.2e}; "
            "refine the grid or enlarge the extent"
        )

    weight = _overlap_weight(ch, n_grid, extent)
    r0 = math.inf if w0_over_r0 == 0.0 else ch.w0 / w0_over_r0
    tp = TurbulenceParams(r0=r0)
    seeds = np.random.SeedSequence(seed).generate_state(n_screens, dtype=np.uint64)
    values = []
    for s in seeds:
        screen = generate_screen(tp, n_grid, extent, int(s))
        amp = np.sum(weight * np.exp(1j * PAIR_PHASE_MULTIPLICITY * screen.samples)) * cell
        values.append((amp.real**2 + amp.imag**2) / baseline)

    mean = math.fsum(values) / n_screens
    var = math.fsum((v - mean) ** 2 for v in values) / (n_screens - 1)
    return McEstimate(mean, math.sqrt(var / n_screens), n_screens)


def save_screen(screen: PhaseScreen, path) -> None:
    """Write the raw grid (row-major float64, little-endian) plus a
    text sidecar holding n, extent, r0 and seed."""
    path = Path(path)
    screen.samples.astype("<f8").tofile(path)
    meta = (
        f"n={screen.n}\nextent={screen.extent!r}\nr0={screen.r0!r}\nseed={screen.seed}\n"
    )
    path.with_suffix(path.suffix + ".meta").write_text(meta)


def load_screen(path) -> PhaseScreen:
    """Read a screen written by save_screen."""
    path = Path(path)
    text = path.with_suffix(path.suffix + ".meta").read_text()
    fields = dict(re.findall(r"(\w+)=(\S+)", text))
    n = int(fields["n"])
    samples = np.fromfile(path, dtype="<f8").reshape(n, n)
    return PhaseScreen(n, float(fields["extent"]), float(fields["r0"]), int(fields["seed"]), samples)
