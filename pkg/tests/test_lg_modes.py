"""Radial mode amplitudes: normalization, symmetry, waist covariance."""

import math

import numpy as np
import pytest

from oamturb.lg_modes import (
    LGModeSpec,
    ModeIndex,
    radial_amplitude,
    radial_orthonormality_defect,
)


def test_orthonormality_defect_sample():
    # the acceptance suite runs the full l in [-4, 4] grid; spot-check here
    for l in (0, -2, 3):
        for p1 in range(3):
            for p2 in range(p1, 3):
                assert radial_orthonormality_defect(l, p1, p2) < 1e-10


def test_amplitude_depends_on_abs_l():
    r = np.linspace(0.0, 5.0, 41)
    a = radial_amplitude(LGModeSpec.of(3, 1), r)
    b = radial_amplitude(LGModeSpec.of(-3, 1), r)
    assert np.array_equal(a, b)


def test_waist_covariance():
    # R_{w0}(r) = R_1(r / w0) / w0
    r = np.linspace(0.01, 6.0, 37)
    for w0 in (0.5, 2.0, 3.7):
        for l, p in ((0, 0), (2, 1), (1, 3)):
            scaled = radial_amplitude(LGModeSpec.of(l, p, w0), r)
            unit = radial_amplitude(LGModeSpec.of(l, p, 1.0), r / w0) / w0
            np.testing.assert_allclose(scaled, unit, rtol=1e-12)


def test_on_axis_value_of_fundamental():
    for w0 in (1.0, 0.25, 8.0):
        assert radial_amplitude(LGModeSpec.of(0, 0, w0), 0.0) == 2.0 / w0
    # any l != 0 mode vanishes on axis
    assert radial_amplitude(LGModeSpec.of(1, 0), 0.0) == 0.0


def test_scalar_and_array_forms():
    spec = LGModeSpec.of(1, 2)
    assert isinstance(radial_amplitude(spec, 0.7), float)
    out = radial_amplitude(spec, np.linspace(0.0, 3.0, 11))
    assert out.shape == (11,)
    assert np.all(np.isfinite(out))


def test_validation():
    with pytest.raises(ValueError):
        ModeIndex(0, -1)
    with pytest.raises(ValueError):
        ModeIndex(31, 0)
    with pytest.raises(ValueError):
        LGModeSpec.of(0, 0, 0.0)
    with pytest.raises(ValueError):
        LGModeSpec.of(0, 0, -1.0)
    with pytest.raises(ValueError):
        LGModeSpec.of(0, 0, math.inf)
    assert LGModeSpec.of(-4, 3, 2.0).mode == ModeIndex(-4, 3)
