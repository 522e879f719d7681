import math

import numpy as np
import pytest

from voigtlab import galerkin as gk
from voigtlab.errors import InvalidArgument, NumericalBlowup, UnsupportedOperation
from voigtlab.spectral_domain import build_synthetic_basis, build_torus_basis


def zeros(d):
    return np.zeros(d.mode_count)


def params(d, nu=1.0, alpha=1.0, s=1.0, h=None):
    return gk.PhysicalParams(nu, alpha, s, zeros(d) if h is None else h)


def unit(d, index=0, value=1.0):
    u = zeros(d)
    u[index] = value
    return u


# --- parameters -----------------------------------------------------------------

@pytest.mark.parametrize("alpha,s", [(1e-3, 0.5), (0.37, 0.75), (20.0, 1.0)])
def test_epsilon_invariant(torus1, alpha, s):
    p = params(torus1, alpha=alpha, s=s)
    assert p.epsilon == pytest.approx(alpha ** (-s), rel=1e-14)
    q = gk.PhysicalParams.from_epsilon(1.0, p.epsilon, s, zeros(torus1))
    assert q.epsilon == pytest.approx(p.epsilon, rel=1e-14)


@pytest.mark.parametrize("kw", [{"nu": 0.0}, {"nu": -1.0}, {"alpha": 0.0},
                                {"s": 0.4}, {"s": 1.2}])
def test_bad_params(torus1, kw):
    with pytest.raises(InvalidArgument):
        params(torus1, **kw)


def test_forcing_is_frozen(torus1):
    h = unit(torus1)
    p = params(torus1, h=h)
    h[0] = 5.0
    assert p.forcing[0] == 1.0
    with pytest.raises(ValueError):
        p.forcing[0] = 2.0


def test_forcing_length_checked(torus1):
    p = gk.PhysicalParams(1.0, 1.0, 1.0, np.zeros(5))
    with pytest.raises(InvalidArgument):
        gk.step(gk.GalerkinState(0.0, zeros(torus1)), p, torus1, 0.1)


# --- stepping -------------------------------------------------------------------

def test_rest_stays_at_rest(torus2):
    st = gk.GalerkinState(0.0, zeros(torus2))
    for _ in range(10):
        st = gk.step(st, params(torus2), torus2, 0.05)
    assert np.all(st.coeffs == 0.0) and st.time == pytest.approx(0.5)


def test_synthetic_domain_cannot_step():
    d = build_synthetic_basis(4, 1.0)
    with pytest.raises(UnsupportedOperation):
        gk.step(gk.GalerkinState(0.0, np.zeros(4)), params(d), d, 0.1)


def test_step_equals_simulate(torus2):
    p = params(torus2, nu=0.3, alpha=0.8, s=0.75, h=gk.random_forcing(torus2, 1.0, 1))
    u0 = gk.random_state(torus2, p, 2.0, 2)
    st = gk.GalerkinState(0.0, u0)
    for _ in range(7):
        st = gk.step(st, p, torus2, 0.01)
    traj = gk.simulate(gk.GalerkinState(0.0, u0), p, torus2, 0.07, 0.01)
    assert np.array_equal(traj.coeffs[-1], st.coeffs)
    assert len(traj) == 8


@pytest.mark.parametrize("s", [0.5, 1.0])
@pytest.mark.parametrize("lam_side", [(1.0, 2.0 * math.pi), (4.0, math.pi)])
@pytest.mark.parametrize("eps", [0.5, 2.0])
def test_exact_linear_decay(s, lam_side, eps):
    lam, side = lam_side
    d = build_torus_basis(side, 1)
    p = gk.PhysicalParams.from_epsilon(1.0, eps, s, zeros(d))
    traj = gk.simulate(gk.GalerkinState(0.0, unit(d, 3)), p, d, 1.0, 1e-3, sample_every=100)
    exact = np.exp(-lam * traj.times / (eps + lam**s))
    assert np.allclose(traj.coeffs[:, 3], exact, rtol=1e-6, atol=0)
    assert np.all(np.delete(traj.coeffs, 3, axis=1) == 0.0)


def test_self_convergence_order(torus2):
    d = torus2
    p = params(d, nu=0.5, alpha=1.0, s=0.75, h=gk.random_forcing(d, 3.0, 4))
    u0 = gk.GalerkinState(0.0, gk.random_state(d, p, 3.0, 5))
    T, base = 1.0, 0.02
    ref = gk.simulate(u0, p, d, T, base / 16, sample_every=16)
    errs = []
    for k in range(3):
        dt = base / 2**k
        # sample at the reference times (every base step)
        traj = gk.simulate(u0, p, d, T, dt, sample_every=2**k)
        errs.append(np.max(np.abs(traj.coeffs - ref.coeffs)))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(abs(o - 2.0) <= 0.2 for o in orders), orders


def test_zero_forcing_voigt_energy_decreases(torus2):
    p = params(torus2, nu=0.2, alpha=2.0, s=0.5)
    traj = gk.simulate(gk.GalerkinState(0.0, gk.random_state(torus2, p, 5.0, 9)), p, torus2,
                       5.0, 0.01, sample_every=5)
    assert np.all(np.diff(traj.voigt_energy) < 0)
    assert np.all(traj.voigt_energy >= traj.energy)


def test_zero_forcing_energy_after_twenty_time_constants(torus2):
    # slowest rate is nu lambda_1 / (eps + lambda_1^s) = nu / 2 here, so
    # t = 20 / (nu lambda_1) gives a factor exp(-20) on the energy
    nu = 0.5
    p = params(torus2, nu=nu, alpha=1.0, s=1.0)
    u0 = gk.random_state(torus2, p, 10.0, 3)
    traj = gk.simulate(gk.GalerkinState(0.0, u0), p, torus2, 20.0 / nu, 0.01,
                       sample_every=4000)
    assert traj.energy[-1] < 1e-6 * traj.energy[0]


def test_first_mode_steady_state(torus2):
    d = torus2
    nu, amp = 0.7, 0.01
    p = params(d, nu=nu, h=unit(d, 0, amp))
    traj = gk.simulate(gk.GalerkinState(0.0, zeros(d)), p, d, 60.0, 0.05, sample_every=1200)
    want = unit(d, 0, amp / (nu * d.eigenvalues[0]))
    assert np.allclose(traj.coeffs[-1], want, rtol=1e-8, atol=1e-14)


def test_blowup_reports_time(torus2):
    p = params(torus2, nu=1e-3, h=gk.random_forcing(torus2, 1e3, 0))
    u0 = gk.random_state(torus2, p, 1e4, 1)
    with pytest.raises(NumericalBlowup) as exc:
        gk.simulate(gk.GalerkinState(0.0, u0), p, torus2, 50.0, 0.5)
    assert 0.0 < exc.value.time <= 50.0


def test_simulate_argument_checks(torus1):
    p = params(torus1)
    st = gk.GalerkinState(1.0, zeros(torus1))
    with pytest.raises(InvalidArgument):
        gk.simulate(st, p, torus1, 0.5, 0.1)
    with pytest.raises(InvalidArgument):
        gk.simulate(st, p, torus1, 2.0, 0.1, sample_every=0)
    with pytest.raises(InvalidArgument):
        gk.simulate(st, p, torus1, 2.0, -0.1)


def test_bit_identical_reruns(torus2):
    p = params(torus2, nu=0.1, alpha=0.5, s=0.75, h=gk.random_forcing(torus2, 2.0, 8))
    u0 = gk.GalerkinState(0.0, gk.random_state(torus2, p, 1.0, 8))
    a = gk.simulate(u0, p, torus2, 2.0, 0.01, 3)
    b = gk.simulate(u0, p, torus2, 2.0, 0.01, 3)
    for f in ("times", "coeffs", "energy", "voigt_energy", "enstrophy", "forcing_pairing"):
        assert getattr(a, f).tobytes() == getattr(b, f).tobytes()


def test_diagnostics_definitions(torus2):
    d = torus2
    p = params(d, alpha=1.7, s=0.6, h=gk.random_forcing(d, 1.0, 2))
    traj = gk.simulate(gk.GalerkinState(0.0, gk.random_state(d, p, 1.0, 3)), p, d, 0.1, 0.05)
    u, lam = traj.coeffs[-1], d.eigenvalues
    assert traj.energy[-1] == pytest.approx(np.sum(u**2))
    assert traj.voigt_energy[-1] == pytest.approx(np.sum((1 + 1.7**0.6 * lam**0.6) * u**2))
    assert traj.enstrophy[-1] == pytest.approx(np.sum(lam * u**2))
    assert traj.forcing_pairing[-1] == pytest.approx(u @ p.forcing)


# --- energy identity -------------------------------------------------------------

def test_residual_zero_at_rest(torus1):
    p = params(torus1)
    traj = gk.simulate(gk.GalerkinState(0.0, zeros(torus1)), p, torus1, 1.0, 0.1)
    r = gk.energy_residual(traj, p)
    assert r.max_abs == 0.0 and len(r.residual) == len(traj) - 2


def test_residual_second_order_single_mode(torus1):
    p = gk.PhysicalParams.from_epsilon(1.0, 0.5, 1.0, zeros(torus1))
    res = []
    for dt in (2e-3, 1e-3, 5e-4):
        traj = gk.simulate(gk.GalerkinState(0.0, unit(torus1)), p, torus1, 1.0, dt)
        res.append(gk.energy_residual(traj, p).max_abs)
    assert res[1] < 1e-6
    for a, b in zip(res, res[1:]):
        assert a / b == pytest.approx(4.0, rel=0.05)


def test_residual_needs_three_samples(torus1):
    p = params(torus1)
    traj = gk.simulate(gk.GalerkinState(0.0, unit(torus1)), p, torus1, 0.2, 0.1, 2)
    with pytest.raises(InvalidArgument):
        gk.energy_residual(traj, p)


# --- mean enstrophy ---------------------------------------------------------------

def test_enstrophy_zero_forcing(torus2):
    p = params(torus2)
    traj = gk.simulate(gk.GalerkinState(0.0, gk.random_state(torus2, p, 1.0, 0)), p, torus2,
                       1.0, 0.1)
    chk = gk.mean_enstrophy_check(traj, p, torus2)
    assert chk.ratio == 0.0 and chk.zero_forcing and chk.passed


def test_enstrophy_equality_case(torus2):
    p = params(torus2, nu=0.5, h=unit(torus2, 0, 0.01))
    traj = gk.simulate(gk.GalerkinState(0.0, zeros(torus2)), p, torus2, 100.0, 0.05, 4)
    chk = gk.mean_enstrophy_check(traj, p, torus2, 0.5)
    assert abs(chk.ratio - 1.0) <= 1e-3


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_enstrophy_random_forcing(torus2, seed):
    p = params(torus2, nu=0.5, h=gk.random_forcing(torus2, 2.0, seed))
    traj = gk.simulate(gk.GalerkinState(0.0, zeros(torus2)), p, torus2, 100.0, 0.02, 5)
    chk = gk.mean_enstrophy_check(traj, p, torus2, 0.5)
    assert chk.ratio <= 1.0 + 1e-3 and chk.passed


def test_enstrophy_bad_fraction(torus1):
    p = params(torus1, h=unit(torus1))
    traj = gk.simulate(gk.GalerkinState(0.0, zeros(torus1)), p, torus1, 1.0, 0.1)
    with pytest.raises(InvalidArgument):
        gk.mean_enstrophy_check(traj, p, torus1, 1.0)


# --- seeded data and absorbing ball -------------------------------------------------

def test_seed_required():
    with pytest.raises(InvalidArgument):
        gk.rng_for(None)


def test_random_state_radius(torus2):
    p = params(torus2, alpha=3.0, s=0.5)
    u = gk.random_state(torus2, p, 7.5, 11)
    assert gk.voigt_norm(torus2, p, u) == pytest.approx(7.5, rel=1e-14)
    assert np.array_equal(u, gk.random_state(torus2, p, 7.5, 11))
    assert np.all(gk.random_state(torus2, p, 0.0, 11) == 0)


def test_random_forcing(torus2):
    h = gk.random_forcing(torus2, 2.0, 4, n_modes=12)
    assert np.linalg.norm(h) == pytest.approx(2.0, rel=1e-14)
    assert np.all(h[12:] == 0) and np.all(h[:12] != 0)
    assert np.all(gk.random_forcing(torus2, 0.0, 4) == 0)
    with pytest.raises(InvalidArgument):
        gk.random_forcing(torus2, 1.0, 4, n_modes=65)


def test_absorbing_radii_agree(torus2):
    nu = 0.5
    p = params(torus2, nu=nu, alpha=1.0, s=1.0, h=gk.random_forcing(torus2, 1.0, 3, n_modes=12))
    rep = gk.absorbing_check(p, torus2, [1.0, 10.0, 100.0], 50.0 / nu, 0.005)
    assert rep.passed and rep.spread <= 0.1


def test_absorbing_zero_forcing(torus2):
    nu = 0.5
    p = params(torus2, nu=nu)
    rep = gk.absorbing_check(p, torus2, [1.0, 10.0, 100.0], 50.0 / nu, 0.005)
    assert rep.passed and max(rep.final_voigt_energy) < 1e-8


def test_absorbing_radius_zero_is_rest_baseline(torus2):
    p = params(torus2, nu=0.5, h=gk.random_forcing(torus2, 1.0, 3, n_modes=12))
    rep = gk.absorbing_check(p, torus2, [0.0], 10.0, 0.01)
    base = gk.simulate(gk.GalerkinState(0.0, zeros(torus2)), p, torus2, 10.0, 0.01, 1000)
    assert rep.final_voigt_energy[0] == base.voigt_energy[-1]


def test_window(torus1):
    p = params(torus1, h=unit(torus1))
    traj = gk.simulate(gk.GalerkinState(0.0, zeros(torus1)), p, torus1, 1.0, 0.1)
    w = traj.window(0.5)
    assert w.times[0] == pytest.approx(0.5) and w.times[-1] == pytest.approx(1.0)
    assert len(w) == 6
