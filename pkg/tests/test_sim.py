import numpy as np
import pytest

from hypstab.errors import CflViolation, DegenerateSeries, NonFinite, SizeMismatch
from hypstab.potential import LyapunovPotential, find_potential
from hypstab.sim import (
    ControlLaw,
    Grid,
    default_bump,
    fit_decay_rate,
    initial_state,
    lyapunov_value,
    run,
    step,
    write_csv,
    write_snapshot,
)
from hypstab.sysdef import advection_system


@pytest.fixture
def pot2d(supersonic):
    return find_potential(supersonic, 0.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid((2,), (1.0,))
    with pytest.raises(ValueError):
        Grid((8,), (-1.0,))
    with pytest.raises(SizeMismatch):
        Grid((8, 8, 8), (1.0, 1.0, 1.0))
    g = Grid((4, 8), (1.0, 2.0))
    assert g.spacing == (0.25, 0.25)
    assert g.cell_volume == pytest.approx(0.0625)


def test_grid_centers_frozen():
    g = Grid((4,), (1.0,))
    assert np.allclose(g.cell_centers()[:, 0], [0.125, 0.375, 0.625, 0.875], atol=0.0)


def test_control_law_validation():
    with pytest.raises(ValueError):
        ControlLaw(mode="wild")
    with pytest.raises(ValueError):
        ControlLaw.scalar(1.5)
    with pytest.raises(ValueError):
        ControlLaw(mode="prescribed")
    assert ControlLaw.prescribed(2.0).datum == 2.0
    assert ControlLaw.zero().mode == "zero"


def test_default_bump_shape_and_range():
    g = Grid((16, 16), (1.0, 1.0))
    w = default_bump(g, 3, amplitude=0.1)
    assert w.shape == (16, 16, 3)
    # cell centers straddle the peak on an even grid
    assert 0.09 < w.max() <= 0.1
    assert w.min() >= 0.0
    # all components identical
    assert np.array_equal(w[..., 0], w[..., 2])


def test_initial_state_accepts_callable():
    g = Grid((8,), (1.0,))
    state = initial_state(g, lambda x: np.stack([x[..., 0], -x[..., 0]], axis=-1))
    assert state.t == 0.0
    assert state.w.shape == (8, 2)
    with pytest.raises(SizeMismatch):
        initial_state(g, np.zeros((7, 2)))
    with pytest.raises(NonFinite):
        initial_state(g, np.full((8, 2), np.inf))


def test_lyapunov_value_frozen():
    g = Grid((10, 10), (1.0, 1.0))
    w = np.ones((10, 10, 2))
    assert lyapunov_value(g, w) == pytest.approx(2.0, rel=1e-14)
    pot = LyapunovPotential(m=np.array([-1.0, 0.0]), c_a=1.0, c_b=0.0)
    # midpoint quadrature of exp(-x1) on the unit square
    expect = 2.0 * np.sum(np.exp(-(np.arange(10) + 0.5) / 10.0)) / 10.0
    assert lyapunov_value(g, w, pot) == pytest.approx(expect, rel=1e-13)


def test_step_enforces_cfl(supersonic, pot2d):
    g = Grid((8, 8), (1.0, 1.0))
    state = initial_state(g, default_bump(g, 3))
    # bound is cfl * dx / rho = 0.45 * 0.125 / 4
    with pytest.raises(CflViolation):
        step(supersonic, g, state, pot2d, ControlLaw.zero(), dt=0.02, cfl=0.45)
    out = step(supersonic, g, state, pot2d, ControlLaw.zero(), dt=0.014, cfl=0.45)
    assert out.t == pytest.approx(0.014)


def test_periodic_step_conserves_energy():
    # zero-potential transport on a ring moves energy without losing much;
    # the tight CFL keeps first-order dissipation under 1% per unit time
    sys_ = advection_system(1.0)
    g = Grid((256,), (1.0,))
    w0 = np.sin(2.0 * np.pi * g.cell_centers()[:, 0])[:, None]
    state = initial_state(g, w0)
    e0 = lyapunov_value(g, state)
    dt = 0.95 / 256.0
    steps = int(round(1.0 / dt))
    energies = [e0]
    for _ in range(steps):
        state = step(sys_, g, state, None, ControlLaw.zero(), dt, cfl=0.95, periodic=True)
        energies.append(lyapunov_value(g, state))
    loss = (e0 - energies[-1]) / e0 / state.t
    assert 0.0 <= loss < 0.01
    assert all(b <= a * (1.0 + 1e-12) for a, b in zip(energies, energies[1:]))


def test_run_record_shapes(supersonic, pot2d):
    g = Grid((16, 16), (1.0, 1.0))
    rec = run(supersonic, g, default_bump(g, 3), pot2d, ControlLaw.zero(), t_end=0.1)
    assert rec.times.shape == rec.lyapunov.shape == rec.boundary.shape == (rec.steps + 1,)
    assert rec.controls.shape == (rec.steps + 1, 3)
    assert rec.times[0] == 0.0
    assert rec.times[-1] == pytest.approx(0.1, rel=1e-12)
    assert np.all(np.diff(rec.times) > 0.0)
    assert rec.c_l == 1.0


def test_run_decays_monotonically(supersonic, pot2d):
    g = Grid((32, 32), (1.0, 1.0))
    rec = run(supersonic, g, default_bump(g, 3), pot2d, ControlLaw.scalar(0.0), t_end=0.25)
    assert np.all(np.diff(rec.lyapunov) <= 0.0)
    assert rec.c_fit is not None and rec.c_fit > rec.c_l


def test_run_scaling_homogeneity(supersonic, pot2d):
    g = Grid((16, 16), (1.0, 1.0))
    w0 = default_bump(g, 3)
    a = run(supersonic, g, w0, pot2d, ControlLaw.zero(), t_end=0.1)
    b = run(supersonic, g, 2.0 * w0, pot2d, ControlLaw.zero(), t_end=0.1)
    assert b.lyapunov[0] == pytest.approx(4.0 * a.lyapunov[0], rel=1e-14)
    assert b.c_fit == pytest.approx(a.c_fit, abs=1e-6)


def test_run_zero_data_has_no_fit(supersonic, pot2d):
    g = Grid((16, 16), (1.0, 1.0))
    rec = run(supersonic, g, np.zeros((16, 16, 3)), pot2d, ControlLaw.zero(), t_end=0.1)
    assert not rec.lyapunov.any()
    assert rec.c_fit is None


def test_run_snapshots(supersonic, pot2d):
    g = Grid((16, 16), (1.0, 1.0))
    rec = run(
        supersonic, g, default_bump(g, 3), pot2d, ControlLaw.zero(),
        t_end=0.2, snapshot_times=(0.05, 0.15),
    )
    assert len(rec.snapshots) == 2
    for requested, (t, state) in zip((0.05, 0.15), rec.snapshots):
        assert requested <= t < requested + 2.0 * (0.2 / rec.steps)
        assert state.w.shape == (16, 16, 3)


def test_run_componentwise_controls_recorded(supersonic, pot2d):
    g = Grid((16, 16), (1.0, 1.0))
    rec = run(supersonic, g, default_bump(g, 3), pot2d, ControlLaw.componentwise(), t_end=0.05)
    assert rec.controls.shape[1] == 3
    assert np.all(rec.controls >= 0.0)
    assert rec.controls[0].max() > 0.0


def test_1d_outflow_empties_the_domain():
    sys_ = advection_system(1.0)
    pot = find_potential(sys_, 0.0)
    g = Grid((64,), (1.0,))
    rec = run(sys_, g, default_bump(g, 1), pot, ControlLaw.scalar(0.0), t_end=1.5)
    # everything has left through the right endpoint by t = 1.5
    assert rec.lyapunov[-1] <= 1e-16 * rec.lyapunov[0]


def test_fit_decay_rate_exact_exponential():
    t = np.linspace(0.0, 2.0, 60)
    series = np.column_stack([t, np.exp(-3.0 * t)])
    assert fit_decay_rate(series) == pytest.approx(3.0, abs=1e-9)


def test_fit_decay_rate_degenerate_cases():
    t = np.linspace(0.0, 1.0, 30)
    with pytest.raises(DegenerateSeries):
        fit_decay_rate(np.column_stack([t, np.zeros(30)]))
    with pytest.raises(DegenerateSeries):
        fit_decay_rate(np.column_stack([t[:5], np.exp(-t[:5])]))
    with pytest.raises(SizeMismatch):
        fit_decay_rate(np.zeros((30, 3)))


def test_write_csv_roundtrip(tmp_path, supersonic, pot2d):
    g = Grid((8, 8), (1.0, 1.0))
    rec = run(supersonic, g, default_bump(g, 3), pot2d, ControlLaw.scalar(0.5), t_end=0.05)
    path = tmp_path / "out.csv"
    write_csv(rec, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,L,boundary_integral,control_1,control_2,control_3"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (rec.steps + 1, 6)
    # %.17g output reproduces the doubles exactly
    assert np.array_equal(data[:, 0], rec.times)
    assert np.array_equal(data[:, 1], rec.lyapunov)
    assert np.array_equal(data[:, 3:], rec.controls)


def test_write_snapshot_format(tmp_path):
    g = Grid((4,), (1.0,))
    state = initial_state(g, np.arange(8.0).reshape(4, 2))
    path = tmp_path / "snap.txt"
    write_snapshot(g, state, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# t = 0"
    assert lines[1] == "# cells = 4"
    assert lines[2] == "# component 1"
    assert [float(v) for v in lines[3].split()] == [0.0, 2.0, 4.0, 6.0]
