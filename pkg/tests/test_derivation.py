"""Velocity-ansatz corrections and the residual order of the one-equation
reduction of the first-order system."""

import math

import numpy as np
import pytest

from bbm5.coefficients import reference_parameters
from bbm5.derivation import (
    DerivationParameters,
    ScaledModel,
    abcd_residual_first,
    correction_terms,
    epsilon_sweep,
    reconstruct_velocity,
)
from bbm5.spectral import Field, Grid, integral, sobolev_norm


@pytest.fixture
def dgrid():
    return Grid(n=256, length=16.0 * math.pi)


def _params(alpha=0.1, beta=0.1):
    return DerivationParameters(alpha=alpha, beta=beta, model=reference_parameters())


def _eta_pair(grid, p, amplitude=0.3):
    model = ScaledModel(grid, p)
    eta = Field.from_samples(
        grid, amplitude / np.cosh(grid.x - grid.length / 2.0) ** 2
    )
    return eta, model.eta_t(eta)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


def test_parameter_range_guard():
    with pytest.raises(ValueError, match="alpha"):
        DerivationParameters(alpha=1.0, beta=0.1, model=reference_parameters())
    with pytest.raises(ValueError, match="beta"):
        DerivationParameters(alpha=0.1, beta=-0.1, model=reference_parameters())


# ---------------------------------------------------------------------------
# Correction terms
# ---------------------------------------------------------------------------


def test_corrections_vanish_on_zero_field(dgrid):
    p = _params()
    z = Field.zero(dgrid)
    for term in correction_terms(z, z, p):
        assert np.all(term.spectral == 0.0)


def test_cubic_correction_is_eighth_of_cube(dgrid):
    p = _params()
    eta = Field.from_samples(dgrid, np.cos(dgrid.x))
    zero = Field.zero(dgrid)
    *_, E = correction_terms(eta, zero, p)
    expected = 0.125 * np.cos(dgrid.x) ** 3
    assert np.abs(E.samples - expected).max() < 1e-12


def test_quadratic_correction_integral_identity(dgrid):
    # A = -eta^2/4, so for unit-L2 data the integral of A is -1/4
    p = _params()
    raw = Field.from_samples(
        dgrid, 1.0 / np.cosh(dgrid.x - dgrid.length / 2.0) ** 2
    )
    eta = Field.from_spectral(dgrid, raw.spectral / sobolev_norm(raw, 0.0))
    A, *_ = correction_terms(eta, Field.zero(dgrid), p)
    assert integral(A) == pytest.approx(-0.25, rel=1e-12)
    # and A is pointwise nonpositive (up to truncation ripple), so
    # ||A||_L1 = 1/4
    assert A.samples.max() <= 1e-9


# ---------------------------------------------------------------------------
# Velocity reconstruction
# ---------------------------------------------------------------------------


def test_velocity_leading_order(dgrid):
    p = _params(alpha=0.0, beta=0.0)
    eta, eta_t = _eta_pair(dgrid, p)
    w = reconstruct_velocity(eta, eta_t, p)
    assert np.abs(w.spectral - eta.spectral).max() == 0.0


def test_first_order_truncation_matches_manual_assembly(dgrid):
    p = _params()
    eta, eta_t = _eta_pair(dgrid, p)
    A, B, *_ = correction_terms(eta, eta_t, p)
    w = reconstruct_velocity(eta, eta_t, p, truncate_first_order=True)
    manual = eta.spectral + p.alpha * A.spectral + p.beta * B.spectral
    assert np.abs(w.spectral - manual).max() < 1e-15


def test_velocity_deviation_is_first_order():
    # ||w - eta||_L2 = O(eps): halving eps roughly halves the gap
    grid = Grid(n=256, length=16.0 * math.pi)
    gaps = []
    for eps in (0.1, 0.05, 0.025):
        p = _params(alpha=eps, beta=eps)
        eta, eta_t = _eta_pair(grid, p)
        w = reconstruct_velocity(eta, eta_t, p)
        gaps.append(sobolev_norm(w - eta, 0.0))
    slopes = [
        math.log(gaps[k] / gaps[k + 1]) / math.log(2.0) for k in range(2)
    ]
    assert min(slopes) >= 0.9


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


def test_residual_zero_at_eps_zero(dgrid):
    p = _params(alpha=0.0, beta=0.0)
    model = ScaledModel(dgrid, p)
    eta, _ = _eta_pair(dgrid, p)
    r1, r2 = abcd_residual_first(eta, model)
    # at eps = 0 the system reduces to the wave equation and the reduction is
    # exact: eta_t = -eta_x, w = eta
    assert r1 < 1e-12 and r2 < 1e-12


def test_residual_translation_invariant(dgrid):
    p = _params()
    model = ScaledModel(dgrid, p)
    eta, _ = _eta_pair(dgrid, p)
    r1a, r2a = abcd_residual_first(eta, model)
    shift = 37  # grid points
    shifted = Field.from_samples(dgrid, np.roll(eta.samples, shift))
    r1b, r2b = abcd_residual_first(shifted, model)
    assert r1b == pytest.approx(r1a, rel=1e-10)
    assert r2b == pytest.approx(r2a, rel=1e-10)


def test_epsilon_sweep_cheap_slope(dgrid):
    # coarse two-point sweep as a smoke check; the acceptance suite runs the
    # full four-point sweep at the strict threshold
    sweep = epsilon_sweep(
        dgrid,
        reference_parameters(),
        epsilons=(0.1, 0.05),
        t_final=0.2,
        dt=5e-3,
        n_checkpoints=2,
    )
    assert sweep["slope_r1_L2"] >= 1.5
    assert sweep["slope_r2_L2"] >= 1.5
