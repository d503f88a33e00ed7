"""Associated Laguerre polynomials and log-factorials.

The polynomial coefficients are assembled from exact integer binomials
(``math.comb``) instead of raw factorial ratios, so they cannot overflow
and the value at x = 0 is the binomial coefficient exactly.  Evaluation
uses Horner's scheme and is vectorized over x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Coefficient growth is tame for the mode indices that occur here; anything
# larger is outside the validated range and gets rejected up front.
INDEX_CAP = 30


@dataclass(frozen=True)
class PolyIndex:
    """Degree p and superscript alpha of an associated Laguerre polynomial."""

    p: int
    alpha: int

    def __post_init__(self):
        if self.p < 0 or self.alpha < 0:
            raise ValueError(f"polynomial indices must be non-negative, got {self}")
        if self.p > INDEX_CAP or self.alpha > INDEX_CAP:
            raise ValueError(
                f"polynomial indices are validated only up to {INDEX_CAP}, got {self}"
            )


def laguerre_coefficients(idx: PolyIndex) -> np.ndarray:
    """Power-series coefficients c_m of L_p^alpha, lowest order first.

    c_m = (-1)^m * (alpha+p)! / ((p-m)! (alpha+m)! m!), computed as an
    exact binomial divided by m! so no intermediate factorial is formed.
    """
    p, a = idx.p, idx.alpha
    coeffs = np.empty(p + 1)
    for m in range(p + 1):
        c = math.comb(a + p, p - m) / math.factorial(m)
        coeffs[m] = -c if m % 2 else c
    return coeffs


def assoc_laguerre(idx: PolyIndex, x):
    """Evaluate L_p^alpha(x).

    Parameters
    ----------
    idx : PolyIndex
        Polynomial indices (p, alpha).
    x : float or ndarray
        Evaluation points, x >= 0 in the intended domain (not enforced).

    Returns
    -------
    float or ndarray, matching the shape of ``x``.
    """
    coeffs = laguerre_coefficients(idx)
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, coeffs[-1])
    for m in range(idx.p - 1, -1, -1):
        out = out * x + coeffs[m]
    if out.ndim == 0:
        return float(out)
    return out


def log_factorial(n: int) -> float:
    """ln(n!) via lgamma; exact to double precision for n = 0, 1."""
    if n < 0:
        raise ValueError(f"factorial argument must be non-negative, got {n}")
    return math.lgamma(n + 1)
