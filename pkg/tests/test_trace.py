import math

import numpy as np
import pytest

from voigtlab import galerkin as gk
from voigtlab import trace as tr
from voigtlab.errors import InvalidArgument, UnsupportedOperation
from voigtlab.spectral_domain import build_synthetic_basis
from voigtlab.triads import triad_table
from voigtlab.zeta import ZetaQuery, zeta_hat


def params(d, nu=0.7, alpha=1.3, s=0.75, h=None):
    return gk.PhysicalParams(nu, alpha, s, np.zeros(d.mode_count) if h is None else h)


@pytest.fixture(scope="module")
def state(torus2):
    return np.random.default_rng(21).standard_normal(torus2.mode_count)


@pytest.mark.parametrize("s", [0.5, 0.75, 1.0])
def test_rest_is_diagonal(torus2, s):
    p = params(torus2, s=s)
    lam = torus2.eigenvalues
    mat = tr.linearized_matrix(torus2, p, np.zeros(torus2.mode_count))
    assert np.allclose(mat, np.diag(-p.nu * lam / (p.epsilon + lam**s)), rtol=1e-15, atol=0)


def test_quadratic_form_oracle(torus2, state):
    """(L theta, theta)_W = -nu |grad theta|^2 - ((theta . grad) u, theta)."""
    d, u = torus2, state
    p = params(d)
    mat = tr.linearized_matrix(d, p, u)
    w = p.epsilon + d.eigenvalues**p.s
    t = triad_table(d)
    rng = np.random.default_rng(5)
    for _ in range(100):
        theta = rng.standard_normal(d.mode_count)
        # orthonormal-basis coordinates of theta
        y = np.sqrt(w) * theta
        form = y @ mat @ y
        # ((theta.grad)u, theta) from the bilinear form: B(theta+u) - B(theta) - B(u)
        # = (theta.grad)u + (u.grad)theta, and ((u.grad)theta, theta) = 0
        cross = t.apply(theta + u) - t.apply(theta) - t.apply(u)
        want = -p.nu * np.sum(d.eigenvalues * theta**2) - cross @ theta
        assert form == pytest.approx(want, rel=1e-10)


def test_jacobian_columns_vs_finite_differences(torus2, state):
    d, u, h = torus2, state, 1e-5
    t = triad_table(d)
    J = tr.jacobian(d, u)
    for col in (0, 7, 31, 63):
        e = np.zeros(d.mode_count)
        e[col] = 1.0
        fd = (t.apply(u + h * e) - t.apply(u - h * e)) / (2 * h)
        assert np.linalg.norm(fd - J[:, col]) <= 1e-6 * np.linalg.norm(J[:, col])


@pytest.mark.parametrize("s", [0.5, 0.75, 1.0])
def test_trace_at_rest_is_minus_nu_zeta_hat(torus2, s):
    p = params(torus2, s=s)
    curve = tr.trace_curve(torus2, p, np.zeros(torus2.mode_count))
    for n in (1, 5, 12, 40, 64):
        want = -p.nu * zeta_hat(torus2, ZetaQuery(p.alpha, s, n))
        assert curve[n - 1] == pytest.approx(want, rel=1e-10)


def test_full_trace_is_matrix_trace(torus2, state):
    p = params(torus2)
    mat = tr.linearized_matrix(torus2, p, state)
    full = tr.trace_n(torus2, p, state, torus2.mode_count)
    assert full == pytest.approx(np.trace(mat), rel=1e-10)
    # similarity invariance: the raw-basis matrix has the same trace
    raw = tr.linearized_raw(torus2, p, state)
    assert np.trace(raw) == pytest.approx(full, rel=1e-10)


def test_increments_nonincreasing(torus2, state):
    curve = tr.trace_curve(torus2, params(torus2), 3.0 * state)
    inc = np.diff(np.concatenate([[0.0], curve]))
    assert np.all(np.diff(inc) <= 1e-12)


def test_ky_fan_against_random_frames(torus2, state):
    d, p, n = torus2, params(torus2), 5
    mat = tr.linearized_matrix(d, p, state)
    best = tr.trace_n(d, p, state, n)
    rng = np.random.default_rng(77)
    frames = np.linalg.qr(rng.standard_normal((10_000, d.mode_count, n)))[0]
    vals = np.einsum("fik,ij,fjk->f", frames, mat, frames)
    assert np.all(vals <= best + 1e-10 * abs(best))
    top = tr.frame_trace(mat, tr.top_frame(d, p, state, n))
    assert top == pytest.approx(best, rel=1e-10)


def test_unscaled_metric(torus2, state):
    p = params(torus2, s=1.0)
    lam = torus2.eigenvalues
    at_rest = tr.trace_curve(torus2, p, np.zeros(torus2.mode_count), metric="unscaled")
    assert at_rest[-1] == pytest.approx(-p.nu * np.sum(lam / (1 + p.alpha * lam)), rel=1e-12)
    # the two metrics differ by the constant factor alpha in time
    sc = tr.trace_curve(torus2, p, state)
    un = tr.trace_curve(torus2, p, state, metric="unscaled")
    assert np.allclose(un, sc / p.alpha, rtol=1e-10)
    with pytest.raises(InvalidArgument):
        tr.trace_curve(torus2, params(torus2, s=0.75), state, metric="unscaled")
    with pytest.raises(InvalidArgument):
        tr.trace_curve(torus2, p, state, metric="physical")


def test_n_out_of_range(torus2, state):
    with pytest.raises(InvalidArgument):
        tr.trace_n(torus2, params(torus2), state, torus2.mode_count + 1)
    with pytest.raises(InvalidArgument):
        tr.trace_n(torus2, params(torus2), state, 0)


def test_synthetic_domain_refused():
    d = build_synthetic_basis(5, 1.0)
    with pytest.raises(UnsupportedOperation):
        tr.linearized_matrix(d, params(d), np.zeros(5))


# --- time averages ----------------------------------------------------------------

def test_q_curve_decay_limit(torus2):
    d = torus2
    p = params(d, nu=1.0, alpha=1.0, s=1.0)
    traj = gk.simulate(gk.GalerkinState(0.0, gk.random_state(d, p, 1.0, 2)), p, d,
                       60.0, 0.05, 20)
    rep = tr.q_curve(traj, d, p, 20, transient_fraction=0.5)
    want = [-p.nu * zeta_hat(d, ZetaQuery(1.0, 1.0, n)) for n in rep.n_values]
    assert np.allclose(rep.q_values, want, rtol=1e-8)
    assert all(q < 0 for q in rep.q_values)
    assert tr.empirical_dimension(rep) == 1
    assert not rep.low_confidence


def test_q_curve_steady_state(torus2):
    d = torus2
    nu, amp = 0.5, 0.01
    p = params(d, nu=nu, alpha=1.0, s=1.0, h=np.eye(d.mode_count)[0] * amp)
    traj = gk.simulate(gk.GalerkinState(0.0, np.zeros(d.mode_count)), p, d, 80.0, 0.05, 20)
    rep = tr.q_curve(traj, d, p, 30, transient_fraction=0.5)
    u_star = np.eye(d.mode_count)[0] * amp / (nu * d.eigenvalues[0])
    want = tr.trace_curve(d, p, u_star, 30)
    assert np.allclose(rep.q_values, want, rtol=0.05)
    inc = np.diff(rep.q_values)
    assert np.all(np.diff(inc) <= 1e-12)


def test_q_curve_split_half(torus2):
    d = torus2
    p = params(d, nu=1.0, alpha=1.0, s=1.0)
    # a decaying transient makes the halves disagree
    traj = gk.simulate(gk.GalerkinState(0.0, gk.random_state(d, p, 50.0, 4)), p, d,
                       2.0, 0.01, 5)
    rep = tr.q_curve(traj, d, p, 10)
    diff = np.max(np.abs(np.subtract(rep.q_first_half, rep.q_second_half)))
    assert rep.split_half_discrepancy == pytest.approx(diff / np.max(np.abs(rep.q_values)))
    assert rep.samples_used == len(traj)
    assert rep.averaging_window == (0.0, pytest.approx(2.0))


def _report(q):
    n = list(range(1, len(q) + 1))
    return tr.TraceReport(n, list(q), list(q), list(q), None, (0.0, 1.0), 1, 0.0, False)


@pytest.mark.parametrize("q,want", [([-1.0, -2.0, -3.0], 1), ([2.0, 0.5, -0.1, -3.0], 3),
                                    ([1.0, 0.0, 0.5], None)])
def test_empirical_dimension(q, want):
    assert tr.empirical_dimension(_report(q)) == want
