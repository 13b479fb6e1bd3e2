"""High/low frequency splitting: decomposition, difference dynamics,
remainder and the reassembly iteration."""

import math

import numpy as np
import pytest

from bbm5.coefficients import Bbm5Coefficients, REFERENCE_COEFFICIENTS
from bbm5.evolution import RhsSpec, StepperConfig, run_simulation, semigroup_apply
from bbm5.spectral import Field, Grid, sobolev_norm
from bbm5.splitting import (
    SplitConfig,
    compute_h,
    evolve_u,
    evolve_v,
    iterate,
    n_sweep,
    split_initial,
)
from bbm5.symbols import random_hs_field


def _spec():
    return RhsSpec(REFERENCE_COEFFICIENTS)


@pytest.fixture
def big_grid():
    return Grid(n=256, length=2.0 * math.pi)


@pytest.fixture
def rough(big_grid):
    return random_hs_field(big_grid, 1.5, np.random.default_rng(7))


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------


def test_split_is_exact(rough):
    u0, v0 = split_initial(rough, 8.0)
    assert np.abs(u0.spectral + v0.spectral - rough.spectral).max() == 0.0


def test_split_supports(rough):
    u0, v0 = split_initial(rough, 8.0)
    xi = np.abs(rough.grid.wavenumbers)
    assert np.all(u0.spectral[xi > 8.0] == 0.0)
    assert np.all(v0.spectral[xi <= 8.0] == 0.0)


def test_split_above_nyquist_leaves_nothing_high(rough):
    _, v0 = split_initial(rough, rough.grid.nyquist + 1.0)
    assert np.all(v0.spectral == 0.0)


def test_split_smooth_variant(rough):
    u0, v0 = split_initial(rough, 8.0, smooth=True)
    assert np.abs(u0.spectral + v0.spectral - rough.spectral).max() == 0.0
    xi = np.abs(rough.grid.wavenumbers)
    # exact below the cutoff, zero beyond twice the cutoff, a ramp between
    assert np.array_equal(u0.spectral[xi <= 8.0], rough.spectral[xi <= 8.0])
    assert np.all(u0.spectral[xi >= 16.0] == 0.0)
    ramp = (xi > 8.0) & (xi < 16.0)
    assert np.any(u0.spectral[ramp] != 0.0)


def test_high_part_norm_bound(rough):
    # ||v0||_{H^rho} <= ||eta0||_{H^s} * N^(rho - s)
    s = 1.5
    for N in (4.0, 8.0, 16.0):
        _, v0 = split_initial(rough, N)
        for rho in (0.0, 1.0):
            assert sobolev_norm(v0, rho) <= (
                sobolev_norm(rough, s) * N ** (rho - s) * (1.0 + 1e-12)
            )


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError, match="cutoff"):
        SplitConfig(cutoff=0.0, s=1.5)
    with pytest.raises(ValueError, match="s must"):
        SplitConfig(cutoff=8.0, s=2.5)
    with pytest.raises(ValueError, match="s must"):
        SplitConfig(cutoff=8.0, s=0.5)


def test_window_time_scaling_and_clamp():
    cfg = SplitConfig(cutoff=16.0, s=1.5)
    assert cfg.t0(1e-4) == pytest.approx(16.0 ** (-1.0))
    # clamp: tiny window but coarse dt
    assert SplitConfig(cutoff=256.0, s=1.0).t0(0.01) == pytest.approx(0.1)
    assert SplitConfig(cutoff=8.0, s=1.5, t0_override=0.33).t0(1e-3) == 0.33


# ---------------------------------------------------------------------------
# Difference dynamics
# ---------------------------------------------------------------------------


def test_v_zero_stays_zero(big_grid, rough):
    u0, _ = split_initial(rough, 8.0)
    cfg = StepperConfig(dt=0.01)
    u_traj = evolve_u(u0, _spec(), cfg, 0.1)
    v_traj = evolve_v(Field.zero(big_grid), u_traj, _spec(), cfg, 0.1)
    assert all(np.all(v.spectral == 0.0) for v in v_traj)


def test_u_zero_reduces_to_plain_equation(big_grid):
    # with u = 0 the difference nonlinearity is F(v), so the v solver must
    # reproduce the production solver
    v0 = random_hs_field(big_grid, 1.5, np.random.default_rng(3), amplitude=0.1)
    cfg = StepperConfig(dt=0.01)
    t0 = 0.1
    zeros = [Field.zero(big_grid) for _ in range(2 * 10 + 1)]
    v_traj = evolve_v(v0, zeros, _spec(), cfg, t0)
    rep = run_simulation(v0, _spec(), cfg, t0, keep_snapshots=True)
    direct = rep.snapshots[-1]
    assert sobolev_norm(v_traj[-1] - direct, 1.0) <= 1e-12


def test_evolve_v_checkpoint_count_guard(big_grid, rough):
    u0, v0 = split_initial(rough, 8.0)
    cfg = StepperConfig(dt=0.01)
    u_traj = evolve_u(u0, _spec(), cfg, 0.1)
    with pytest.raises(ValueError, match="checkpoints"):
        evolve_v(v0, u_traj[:-1], _spec(), cfg, 0.1)


def test_additivity(big_grid, rough):
    # u + v must reconstruct the direct solve of the full equation
    eta0 = Field.from_spectral(big_grid, 0.5 * rough.spectral)
    u0, v0 = split_initial(eta0, 8.0)
    cfg = StepperConfig(dt=5e-3)
    t0 = 0.1
    u_traj = evolve_u(u0, _spec(), cfg, t0)
    v_traj = evolve_v(v0, u_traj, _spec(), cfg, t0)
    rep = run_simulation(eta0, _spec(), cfg, t0, keep_snapshots=True)
    err = sobolev_norm(u_traj[-1] + v_traj[-1] - rep.snapshots[-1], 1.0)
    assert err <= 1e-8


# ---------------------------------------------------------------------------
# Remainder
# ---------------------------------------------------------------------------


def test_h_zero_for_zero_v(big_grid, rough):
    u0, _ = split_initial(rough, 8.0)
    cfg = StepperConfig(dt=0.01)
    u_traj = evolve_u(u0, _spec(), cfg, 0.1)
    v_traj = evolve_v(Field.zero(big_grid), u_traj, _spec(), cfg, 0.1)
    h, norms = compute_h(v_traj, Field.zero(big_grid), 0.1, REFERENCE_COEFFICIENTS)
    assert norms["h_H2"] == 0.0


def test_h_zero_under_linear_only_dynamics(big_grid, rough):
    # nonlinearity off: v evolves freely, so the Duhamel remainder vanishes
    u0, v0 = split_initial(rough, 8.0)
    spec = RhsSpec(REFERENCE_COEFFICIENTS, linear_only=True)
    cfg = StepperConfig(dt=0.01)
    t0 = 0.1
    u_traj = evolve_u(u0, spec, cfg, t0)
    v_traj = evolve_v(v0, u_traj, spec, cfg, t0)
    _, norms = compute_h(v_traj, v0, t0, REFERENCE_COEFFICIENTS)
    assert norms["h_H2"] <= 1e-12


def test_h_norm_summary_consistency(big_grid, rough):
    u0, v0 = split_initial(rough, 8.0)
    cfg = StepperConfig(dt=0.01)
    t0 = 0.1
    u_traj = evolve_u(u0, _spec(), cfg, t0)
    v_traj = evolve_v(v0, u_traj, _spec(), cfg, t0)
    h, norms = compute_h(v_traj, v0, t0, REFERENCE_COEFFICIENTS)
    assert norms["h_H1"] <= norms["h_H2"] * (1.0 + 1e-12)
    # equivalent-norm sandwich for the H1 + |dx .|_H1 combination
    assert norms["h_H2"] <= norms["h_H1_plus_dxh_H1"] * (1.0 + 1e-12)
    assert norms["h_H1_plus_dxh_H1"] <= 2.0 * norms["h_H2"] * (1.0 + 1e-12)


# ---------------------------------------------------------------------------
# Iteration and sweep
# ---------------------------------------------------------------------------


def test_iterate_requires_energy_conservation(big_grid, rough):
    off = Bbm5Coefficients(
        gamma1=REFERENCE_COEFFICIENTS.gamma1,
        gamma2=REFERENCE_COEFFICIENTS.gamma2,
        delta1=REFERENCE_COEFFICIENTS.delta1,
        delta2=REFERENCE_COEFFICIENTS.delta2,
        gamma=0.2,
    )
    cfg = SplitConfig(cutoff=8.0, s=1.5, k_max=1)
    with pytest.raises(ValueError, match="7/48"):
        iterate(rough, cfg, RhsSpec(off), StepperConfig(dt=0.01))


def test_iterate_k_zero_returns_split_only(big_grid, rough):
    cfg = SplitConfig(cutoff=8.0, s=1.5, k_max=0)
    states, rep = iterate(rough, cfg, _spec(), StepperConfig(dt=0.01))
    assert len(states) == 1
    u0, v0 = split_initial(rough, 8.0)
    assert np.array_equal(states[0].u.spectral, u0.spectral)
    assert rep["h_H2"] == []


def test_iterate_one_round_invariants(big_grid, rough):
    cfg = SplitConfig(cutoff=8.0, s=1.5, k_max=1, t0_override=0.05)
    states, rep = iterate(rough, cfg, _spec(), StepperConfig(dt=5e-3))
    assert len(states) == 2
    # v is propagated freely, so its H^s norm is invariant
    assert rep["v_hs"][1] == pytest.approx(rep["v_hs"][0], rel=1e-12)
    # the u energy is conserved over the window up to integrator error
    assert rep["E_u_t0"][0] == pytest.approx(rep["E_u"][0], rel=1e-8)
    # reconstruction identity: u1 + v1 equals the evolved total state
    total = run_simulation(rough, _spec(), StepperConfig(dt=5e-3), 0.05,
                           keep_snapshots=True).snapshots[-1]
    u1_plus_v1 = states[1].u + states[1].v
    assert sobolev_norm(u1_plus_v1 - total, 1.0) <= 1e-8


def test_n_sweep_nyquist_guard(big_grid, rough):
    with pytest.raises(ValueError, match="Nyquist"):
        n_sweep(rough, 1.5, (64.0, 128.0), spec=_spec(),
                stepper=StepperConfig(dt=0.01))


def test_n_sweep_single_cutoff_has_no_slope(big_grid, rough):
    out = n_sweep(rough, 1.5, (8.0,), spec=_spec(), stepper=StepperConfig(dt=0.01))
    assert "h_slope" not in out
    assert len(out["rows"]) == 1
    assert {"N", "t0", "h_H2", "u_H2_t0", "E_u1_minus_E_ut0"} <= out["rows"][0].keys()
