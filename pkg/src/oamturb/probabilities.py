"""Mode detection probabilities behind Kolmogorov turbulence.

Three channel kinds share one integral family, differing in the radial
weight and in how much turbulent phase the detected amplitude has
accumulated:

* ``single``: one photon prepared in (l0, p0), detected in (l, 0).
* ``joint``: both photons of a collinear down-converted pair, pump
  (l0, p0), detected in (l1, 0) and (l2, 0).  Signal and idler sample
  the same phase screen at the same transverse point, so the pair
  amplitude carries twice the phase and the mean-square pair phase
  difference is four times the one-photon value.
* ``signal``: the one-photon marginal of a pair, pump profile weighting
  |R_p0^l0|^2, detected in (l1, 0); the phase decorrelation acts at a
  single radius across the angle difference only.

Raw values carry an arbitrary overall constant; every reported curve is
normalized by the zero-turbulence raw value of the momentum-conserving
reference channel of its family, so conserving channels start at 1 and
forbidden (delta_l != 0) channels start at 0.

Setting the environment variable OAMTURB_CHECK_SYMMETRY=1 makes every
probability evaluation also integrate the sine-harmonic counterpart
over the mirrored full circle and assert that it vanishes; this guards
the evenness assumption the quadrature reduction relies on.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .lg_modes import LGModeSpec, ModeIndex, radial_amplitude
from .quadrature import (
    NonConvergence,
    QuadratureConfig,
    integrate_product_2d,
    integrate_product_3d,
)
from .turbulence import TurbulenceParams, chord_distance, coherence

# Photons of a pair crossing the screen together; squares to the factor
# on the mean-square phase difference.
PAIR_PHASE_MULTIPLICITY = 2.0

KINDS = ("single", "joint", "signal")


class InvalidChannel(ValueError):
    """Channel is outside the domain of the requested operation."""


class DegenerateBaseline(RuntimeError):
    """Zero-turbulence reference integral is too small to divide by."""


class NoInteriorPeak(RuntimeError):
    """Coarse scan found its maximum at a bracket edge."""


class DegenerateFit(ValueError):
    """Peak-scaling fit needs at least two distinct mismatch values."""


@dataclass(frozen=True)
class ChannelSpec:
    """One measurable channel: kind, pump mode, detected OAM value(s)."""

    kind: str
    pump: ModeIndex
    signal_l: int
    idler_l: int | None = None
    w0: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidChannel(f"unknown channel kind {self.kind!r}")
        if (self.idler_l is not None) != (self.kind == "joint"):
            raise InvalidChannel("idler_l is required for joint channels and only there")
        if not (self.w0 > 0.0) or math.isinf(self.w0):
            raise InvalidChannel(f"w0 must be positive and finite, got {self.w0}")
        ModeIndex(self.signal_l, 0)
        if self.idler_l is not None:
            ModeIndex(self.idler_l, 0)

    @classmethod
    def single(cls, l0: int, l: int, p0: int = 0, w0: float = 1.0) -> "ChannelSpec":
        return cls("single", ModeIndex(l0, p0), l, None, w0)

    @classmethod
    def joint(cls, l0: int, l1: int, l2: int, p0: int = 0, w0: float = 1.0) -> "ChannelSpec":
        return cls("joint", ModeIndex(l0, p0), l1, l2, w0)

    @classmethod
    def signal(cls, l0: int, l1: int, p0: int = 0, w0: float = 1.0) -> "ChannelSpec":
        return cls("signal", ModeIndex(l0, p0), l1, None, w0)

    @property
    def delta_l(self) -> int:
        if self.kind == "joint":
            return self.signal_l + self.idler_l - self.pump.l
        return self.signal_l - self.pump.l

    def conserving_reference(self) -> "ChannelSpec":
        """The delta_l = 0 channel this one is normalized against."""
        if self.kind == "joint":
            return replace(self, signal_l=self.pump.l - self.idler_l)
        return replace(self, signal_l=self.pump.l)

    def label(self) -> str:
        """Compact comma-free identifier, safe as a single CSV field."""
        if self.kind == "joint":
            return (
                f"joint(l0={self.pump.l} p0={self.pump.p} "
                f"l1={self.signal_l} l2={self.idler_l})"
            )
        if self.kind == "signal":
            return f"signal(l0={self.pump.l} p0={self.pump.p} l1={self.signal_l})"
        return f"single(l0={self.pump.l} p0={self.pump.p} l={self.signal_l})"


@dataclass(frozen=True)
class ProbabilityPoint:
    """One sweep sample: raw integral plus its family-normalized value."""

    w0_over_r0: float
    value: float
    raw: float
    channel: ChannelSpec
    delta_l: int


@dataclass(frozen=True)
class PeakResult:
    """Location and shape of an interior maximum of a delta_l != 0 curve."""

    channel: ChannelSpec
    delta_l: int
    w0_over_r0_max: float
    peak_value: float
    half_max_width: float


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line through (delta_l, peak location) points."""

    family: str
    l0: int
    delta_l: tuple[int, ...]
    peaks: tuple[PeakResult, ...]
    slope: float
    intercept: float
    max_residual: float
    rel_max_residual: float


def _phase_multiplicity(kind: str) -> float:
    return PAIR_PHASE_MULTIPLICITY if kind == "joint" else 1.0


def _effective_params(ch: ChannelSpec, w0_over_r0: float, tp: TurbulenceParams) -> TurbulenceParams:
    """Fold the sweep ratio and the pair phase factor into the Fried parameter.

    tp contributes the structure-function constants; its own r0 is not
    used, because the sweep variable already fixes w0/r0.  A phase
    multiplicity m rescales r0 by m^(-2/exponent), which is identical to
    multiplying the structure function by m^2.
    """
    if w0_over_r0 < 0.0:
        raise InvalidChannel(f"w0_over_r0 must be >= 0, got {w0_over_r0}")
    if w0_over_r0 == 0.0:
        return tp.with_r0(math.inf)
    m = _phase_multiplicity(ch.kind)
    return tp.with_r0(ch.w0 / w0_over_r0 * m ** (-2.0 / tp.exponent))


def _radial_pair_product(ch: ChannelSpec):
    """Vectorized product of the radial amplitudes entering the overlap."""
    modes = [LGModeSpec(ch.pump, ch.w0), LGModeSpec.of(ch.signal_l, 0, ch.w0)]
    if ch.kind == "joint":
        modes.append(LGModeSpec.of(ch.idler_l, 0, ch.w0))

    def product(r):
        out = radial_amplitude(modes[0], r)
        for m in modes[1:]:
            out = out * radial_amplitude(m, r)
        return out

    return product


_check_symmetry_env = os.environ.get("OAMTURB_CHECK_SYMMETRY", "")


def _maybe_check_symmetry(integrand_of_kernel, cfg, w0, scale):
    """Assert the sine-harmonic integral vanishes on the mirrored circle."""
    if _check_symmetry_env != "1":
        return
    odd = integrate_product_3d(integrand_of_kernel(np.sin), cfg, w0, exploit_symmetry=False)
    assert abs(odd) <= 1e-10 * scale, (
        f"sine-kernel integral {odd!r} is not negligible against {scale!r}; "
        "the angular evenness assumption is violated"
    )


def _maybe_check_symmetry_2d(integrand_of_kernel, cfg, w0, scale):
    if _check_symmetry_env != "1":
        return
    odd = integrate_product_2d(integrand_of_kernel(np.sin), cfg, w0, exploit_symmetry=False)
    assert abs(odd) <= 1e-10 * scale, (
        f"sine-kernel integral {odd!r} is not negligible against {scale!r}"
    )


def _pair_overlap_raw(ch: ChannelSpec, w0_over_r0: float, tp: TurbulenceParams, cfg: QuadratureConfig) -> float:
    """Shared 3D form for single and joint channels."""
    params = _effective_params(ch, w0_over_r0, tp)
    fr = _radial_pair_product(ch)
    dl = ch.delta_l

    def integrand_of_kernel(harmonic):
        def f(r, rp, dtheta):
            d = chord_distance(r, rp, dtheta)
            return fr(r) * fr(rp) * coherence(d, params) * harmonic(dl * dtheta)

        return f

    value = integrate_product_3d(integrand_of_kernel(np.cos), cfg, ch.w0)
    _maybe_check_symmetry(integrand_of_kernel, cfg, ch.w0, max(abs(value), 1e-12))
    return value


def joint_probability(
    ch: ChannelSpec,
    w0_over_r0: float,
    tp: TurbulenceParams | None = None,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Raw pair detection integral for a joint channel.

    Integrand: the six radial amplitude factors at radii r and r',
    the pair coherence over the chord between the two points, and
    cos(delta_l * dtheta); measure r r' dr dr' ddtheta.
    """
    if ch.kind != "joint":
        raise InvalidChannel(f"expected a joint channel, got {ch.kind}")
    return _pair_overlap_raw(ch, w0_over_r0, tp or TurbulenceParams(), cfg or QuadratureConfig())


def single_photon_probability(
    ch: ChannelSpec,
    w0_over_r0: float,
    tp: TurbulenceParams | None = None,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Raw one-photon crosstalk integral (four radial factors)."""
    if ch.kind != "single":
        raise InvalidChannel(f"expected a single channel, got {ch.kind}")
    return _pair_overlap_raw(ch, w0_over_r0, tp or TurbulenceParams(), cfg or QuadratureConfig())


def signal_probability(
    ch: ChannelSpec,
    w0_over_r0: float,
    tp: TurbulenceParams | None = None,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Raw detected-signal marginal: pump and signal intensities at one
    radius, decorrelated across the angle difference only."""
    if ch.kind != "signal":
        raise InvalidChannel(f"expected a signal channel, got {ch.kind}")
    tp = tp or TurbulenceParams()
    cfg = cfg or QuadratureConfig()
    params = _effective_params(ch, w0_over_r0, tp)
    pump = LGModeSpec(ch.pump, ch.w0)
    sig = LGModeSpec.of(ch.signal_l, 0, ch.w0)
    dl = ch.delta_l

    def integrand_of_kernel(harmonic):
        def f(r, dtheta):
            g = radial_amplitude(pump, r) ** 2 * radial_amplitude(sig, r) ** 2
            return g * coherence(chord_distance(r, r, dtheta), params) * harmonic(dl * dtheta)

        return f

    value = integrate_product_2d(integrand_of_kernel(np.cos), cfg, ch.w0)
    _maybe_check_symmetry_2d(integrand_of_kernel, cfg, ch.w0, max(abs(value), 1e-12))
    return value


_DISPATCH = {
    "single": single_photon_probability,
    "joint": joint_probability,
    "signal": signal_probability,
}


def probability(ch: ChannelSpec, w0_over_r0: float, tp=None, cfg=None) -> float:
    """Raw integral for any channel kind."""
    return _DISPATCH[ch.kind](ch, w0_over_r0, tp, cfg)


@lru_cache(maxsize=128)
def _family_baseline_cached(ref: ChannelSpec, tp: TurbulenceParams, cfg: QuadratureConfig) -> float:
    return probability(ref, 0.0, tp, cfg)


def family_baseline(
    ch: ChannelSpec,
    tp: TurbulenceParams | None = None,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Zero-turbulence raw value of the conserving reference channel.

    Computed once per (reference, config) and cached; raises
    DegenerateBaseline if it is not usable as a divisor.
    """
    baseline = _family_baseline_cached(
        ch.conserving_reference(), tp or TurbulenceParams(), cfg or QuadratureConfig()
    )
    if not math.isfinite(baseline) or baseline <= 1e-12:
        raise DegenerateBaseline(f"reference integral {baseline!r} for {ch.label()}")
    return baseline


def normalize_family(points, baseline: float):
    """Divide raw values by the family baseline; returns new points.

    Forbidden channels at zero turbulence integrate to exact zero only
    analytically; quadrature noise of order -1e-18 is snapped to 0 so
    normalized values keep their probability meaning.
    """
    if not math.isfinite(baseline) or baseline <= 0.0:
        raise DegenerateBaseline(f"cannot normalize by {baseline!r}")
    out = []
    for pt in points:
        v = pt.raw / baseline
        if -1e-9 < v < 0.0:
            v = 0.0
        out.append(replace(pt, value=v))
    return out


def normalized_probability(ch: ChannelSpec, w0_over_r0: float, tp=None, cfg=None) -> float:
    """Family-normalized probability at a single sweep point."""
    v = probability(ch, w0_over_r0, tp, cfg) / family_baseline(ch, tp, cfg)
    return 0.0 if -1e-9 < v < 0.0 else v


def sweep(ch: ChannelSpec, grid, tp=None, cfg=None):
    """Normalized probability curve over an increasing w0/r0 grid.

    A NonConvergence raised by any point is re-raised with the offending
    grid value prepended, so a long sweep reports where it stalled.
    """
    ts = sorted(float(t) for t in grid)
    if not ts:
        raise ValueError("sweep grid is empty")
    points = []
    for t in ts:
        try:
            raw = probability(ch, t, tp, cfg)
        except NonConvergence as exc:
            raise NonConvergence(
                f"at w0_over_r0={t!r}", exc.previous, exc.last
            ) from exc
        points.append(ProbabilityPoint(t, math.nan, raw, ch, ch.delta_l))
    return normalize_family(points, family_baseline(ch, tp, cfg))


SCAN_POINTS = 32
PEAK_TOLERANCE = 1e-3
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fun, lo, hi, tol):
    a, b = lo, hi
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
        if fc > best_f:
            best_x, best_f = c, fc
        if fd > best_f:
            best_x, best_f = d, fd
    return 0.5 * (a + b), best_f


def _interp_crossing(x0, v0, x1, v1, level):
    return x0 + (level - v0) * (x1 - x0) / (v1 - v0)


def find_peak(
    ch: ChannelSpec,
    bracket: tuple[float, float] = (0.02, 3.0),
    tp: TurbulenceParams | None = None,
    cfg: QuadratureConfig | None = None,
) -> PeakResult:
    """Locate the interior maximum of a delta_l != 0 probability curve.

    A 32-point scan over the bracket seeds a golden-section refinement
    of the peak location to PEAK_TOLERANCE; the full width at half
    maximum comes from linear interpolation on the scan, extending it
    outward when a half-maximum crossing falls outside the bracket.
    """
    if ch.delta_l == 0:
        raise InvalidChannel("conserving channels are monotone; no interior peak")
    lo, hi = bracket
    if not (0.0 < lo < hi):
        raise InvalidChannel(f"bad bracket {bracket}")
    baseline = family_baseline(ch, tp, cfg)

    def val(t):
        return probability(ch, t, tp, cfg) / baseline

    xs = list(np.linspace(lo, hi, SCAN_POINTS))
    vs = [val(t) for t in xs]
    i = int(np.argmax(vs))
    if i == 0 or i == len(xs) - 1:
        raise NoInteriorPeak(f"maximum at bracket edge t={xs[i]} for {ch.label()}")
    t_max, peak = _golden_max(val, xs[i - 1], xs[i + 1], PEAK_TOLERANCE)
    peak = max(peak, vs[i])

    half = 0.5 * peak
    step = xs[1] - xs[0]
    # march left of the peak until the curve drops below half maximum
    j = i
    while vs[j] >= half:
        if j == 0:
            if xs[0] <= step * 1e-3:
                raise NoInteriorPeak(f"no left half-maximum crossing for {ch.label()}")
            xs.insert(0, max(xs[0] - step, xs[0] / 4.0))
            vs.insert(0, val(xs[0]))
            i += 1
        else:
            j -= 1
    left = _interp_crossing(xs[j], vs[j], xs[j + 1], vs[j + 1], half)
    # march right, extending the scan up to 4x the original span
    k = i
    while vs[k] >= half:
        if k == len(xs) - 1:
            if xs[-1] - hi > 4.0 * (hi - lo):
                raise NoInteriorPeak(f"no right half-maximum crossing for {ch.label()}")
            xs.append(xs[-1] + step)
            vs.append(val(xs[-1]))
        k += 1
    right = _interp_crossing(xs[k - 1], vs[k - 1], xs[k], vs[k], half)

    return PeakResult(ch, ch.delta_l, t_max, peak, right - left)


def _scaling_channel(family: str, l0: int, delta_l: int) -> ChannelSpec:
    if family == "single":
        return ChannelSpec.single(l0, l0 + delta_l)
    if family == "joint":
        # idler carries the pump OAM; the signal absorbs the mismatch
        return ChannelSpec.joint(l0, delta_l, l0)
    raise InvalidChannel(f"no peak-scaling family {family!r}")


def peak_scaling(
    family: str,
    l0: int,
    delta_ls,
    tp: TurbulenceParams | None = None,
    cfg: QuadratureConfig | None = None,
    bracket: tuple[float, float] = (0.02, 3.0),
) -> ScalingFit:
    """Fit peak location against momentum mismatch for one channel family.

    Reports the least-squares line and the largest residual, both
    absolute and relative to the fitted-value range.
    """
    dls = tuple(int(d) for d in delta_ls)
    if len(set(dls)) < 2:
        raise DegenerateFit(f"need at least two distinct mismatches, got {dls}")
    peaks = tuple(
        find_peak(_scaling_channel(family, l0, d), bracket, tp, cfg) for d in dls
    )
    x = np.asarray(dls, dtype=float)
    y = np.asarray([p.w0_over_r0_max for p in peaks])
    design = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = intercept + slope * x
    max_residual = float(np.max(np.abs(y - fitted)))
    span = float(fitted.max() - fitted.min())
    if span <= 0.0:
        raise DegenerateFit("fitted values are constant; cannot scale residuals")
    return ScalingFit(
        family=family,
        l0=l0,
        delta_l=dls,
        peaks=peaks,
        slope=float(slope),
        intercept=float(intercept),
        max_residual=max_residual,
        rel_max_residual=max_residual / span,
    )
