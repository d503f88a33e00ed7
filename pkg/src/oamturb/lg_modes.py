"""Laguerre-Gaussian mode amplitudes at the beam waist.

Only the radial factor matters for the detection integrals: the angular
part exp(i l theta) / sqrt(2 pi) is carried analytically by the cosine
kernels downstream.  The radial amplitude is normalized so that
integral of R^2 r dr over [0, inf) equals 1 for every (l, p), which makes
the set {R_p^l, p = 0, 1, ...} orthonormal at fixed l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import NonConvergence, QuadratureConfig, gauss_legendre
from .special_functions import PolyIndex, assoc_laguerre, log_factorial


@dataclass(frozen=True)
class ModeIndex:
    """Azimuthal number l (any sign) and radial index p >= 0."""

    l: int
    p: int

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"radial index must be non-negative, got p={self.p}")
        # reuse the polynomial-range validation; |l| is the superscript
        PolyIndex(self.p, abs(self.l))


@dataclass(frozen=True)
class LGModeSpec:
    """A mode index bound to a beam waist w0."""

    mode: ModeIndex
    w0: float = 1.0

    def __post_init__(self):
        if not (self.w0 > 0.0) or math.isinf(self.w0):
            raise ValueError(f"w0 must be positive and finite, got {self.w0}")

    @classmethod
    def of(cls, l: int, p: int, w0: float = 1.0) -> "LGModeSpec":
        return cls(ModeIndex(l, p), w0)


def radial_amplitude(spec: LGModeSpec, r):
    """Normalized radial amplitude R_p^l(r) at the waist.

    R = 2 sqrt(p!/(p+|l|)!) (1/w0) (sqrt(2) r / w0)^|l|
        L_p^|l|(2 r^2 / w0^2) exp(-r^2 / w0^2)

    Depends on l only through |l|.  Vectorized over r.
    """
    l, p, w0 = abs(spec.mode.l), spec.mode.p, spec.w0
    r = np.asarray(r, dtype=float)
    u = r / w0
    norm = 2.0 / w0 * math.exp(0.5 * (log_factorial(p) - log_factorial(p + l)))
    poly = assoc_laguerre(PolyIndex(p, l), 2.0 * u * u)
    out = norm * (math.sqrt(2.0) * u) ** l * poly * np.exp(-u * u)
    if out.ndim == 0:
        return float(out)
    return out


def radial_orthonormality_defect(
    l: int, p1: int, p2: int, w0: float = 1.0, cfg: QuadratureConfig | None = None
) -> float:
    """|integral R_p1^l R_p2^l r dr  -  delta_{p1 p2}| on [0, rmax].

    The overlap is integrated with the configured Gauss-Legendre rule,
    doubling nodes until stable; the Gaussian envelope makes the [0,
    rmax] truncation irrelevant at rmax = r_max_factor * w0.
    """
    if cfg is None:
        cfg = QuadratureConfig()
    m1 = LGModeSpec.of(l, p1, w0)
    m2 = LGModeSpec.of(l, p2, w0)
    r_max = cfg.r_max_factor * w0

    def overlap(n):
        rule = gauss_legendre(n, 0.0, r_max)
        r = rule.nodes
        return float(
            (rule.weights * r) @ (radial_amplitude(m1, r) * radial_amplitude(m2, r))
        )

    target = 1.0 if p1 == p2 else 0.0
    previous = overlap(cfg.radial_nodes)
    for k in range(1, max(1, cfg.max_refinements) + 1):
        current = overlap(cfg.radial_nodes << k)
        # delta functions live on the unit scale, so compare against 1
        if abs(current - previous) <= cfg.rel_tolerance * max(abs(current), 1.0):
            return abs(current - target)
        previous = current
    raise NonConvergence("mode overlap did not stabilize", previous, current)
