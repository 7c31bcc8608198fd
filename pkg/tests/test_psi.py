import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramshift._psi import psi, psi_derivative, remainder_coefficients

import oracles


@pytest.mark.parametrize("p0", [0.25, 0.75])
def test_removable_singularities(p0):
    assert psi(p0) == pytest.approx(oracles.psi_limit(p0), abs=1e-12)
    for h in (1e-9, -3e-6, 1e-4, -1.5e-4):
        assert psi(p0 + h) == pytest.approx(float(oracles.psi(p0 + h)), abs=1e-11)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0))
def test_matches_high_precision(p):
    if min(abs(p - 0.25), abs(p - 0.75)) < 1e-12:
        expected = oracles.psi_limit(0.25 if p < 0.5 else 0.75)
    else:
        expected = float(oracles.psi(p))
    assert float(psi(p)) == pytest.approx(expected, rel=1e-11, abs=1e-11)


def test_switchover_is_continuous():
    # both branches agree on either side of the |cos 2 pi p| = 1e-3 edge
    edge = 0.25 + np.arccos(1e-3) / (2 * np.pi) - 0.25
    h = 1e-3 / (2 * np.pi)
    vals = psi(np.array([0.25 - h * 1.0001, 0.25 - h * 0.9999]))
    assert vals[0] == pytest.approx(vals[1], abs=1e-6)
    assert edge > 0


@pytest.mark.parametrize("k,tol", [(1, 1e-12), (2, 1e-11), (3, 1e-11), (4, 1e-10), (5, 1e-9), (6, 1e-8), (7, 1e-7)])
def test_derivatives_against_mpmath(k, tol):
    for p in (0.0, 0.1, 0.3, 0.5, 0.77, 0.95, 1.0):
        assert float(psi_derivative(p, k)) == pytest.approx(oracles.psi_diff(p, k), abs=tol)


def test_remainder_coefficient_counts():
    p = np.linspace(0, 1, 5)
    assert len(remainder_coefficients(p, 0)) == 0
    assert len(remainder_coefficients(p, 3)) == 3
    c0, c1 = remainder_coefficients(p, 2)
    np.testing.assert_allclose(c0, psi(p))
    # C1 = -Psi'''/(96 pi^2) is a small coefficient
    assert np.max(np.abs(c1)) < 0.05
