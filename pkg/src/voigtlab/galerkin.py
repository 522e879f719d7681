"""Galerkin integration of the time-scaled fractional Voigt system.

The solver advances

    (eps + A^s) du/dt + Pi (u . grad) u + nu A u = h,    eps = alpha^(-s),

in the torus eigenbasis, i.e. in the scaled time tau = alpha^(-s) t.  All
times reported here (sample times, t_final, dt) are in that scaled time.
The Voigt mass eps + A^s is diagonal, so the scheme below only ever divides.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument, NumericalBlowup
from .spectral_domain import SpectralDomain, _check_length
from .triads import triad_table


@dataclasses.dataclass(frozen=True, eq=False)
class PhysicalParams:
    """Viscosity, regularization, fractional order and forcing coefficients."""

    nu: float
    alpha: float
    s: float
    forcing: np.ndarray
    epsilon: float = dataclasses.field(init=False)

    def __post_init__(self):
        if not self.nu > 0:
            raise InvalidArgument(f"nu must be positive, got {self.nu!r}")
        if not self.alpha > 0:
            raise InvalidArgument(f"alpha must be positive, got {self.alpha!r}")
        if not 0.5 <= self.s <= 1.0:
            raise InvalidArgument(f"s must lie in [1/2, 1], got {self.s!r}")
        h = np.array(self.forcing, dtype=float)
        h.setflags(write=False)
        object.__setattr__(self, "forcing", h)
        object.__setattr__(self, "epsilon", self.alpha ** (-self.s))

    @classmethod
    def from_epsilon(cls, nu, epsilon, s, forcing):
        return cls(nu=nu, alpha=epsilon ** (-1.0 / s), s=s, forcing=forcing)

    @property
    def forcing_norm(self) -> float:
        return float(np.linalg.norm(self.forcing))

    def as_dict(self):
        return {"nu": self.nu, "alpha": self.alpha, "s": self.s, "epsilon": self.epsilon,
                "forcing_l2": self.forcing_norm}


@dataclasses.dataclass(frozen=True)
class GalerkinState:
    time: float
    coeffs: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Samples of a run. ``voigt_energy`` is |u|^2 + alpha^s |u|^2_{V^s}."""

    times: np.ndarray
    coeffs: np.ndarray
    energy: np.ndarray
    voigt_energy: np.ndarray
    enstrophy: np.ndarray
    forcing_pairing: np.ndarray

    def __len__(self):
        return len(self.times)

    def window(self, start_fraction: float) -> "TrajectoryRecord":
        """Samples with time >= t0 + start_fraction (T - t0)."""
        t0, t1 = self.times[0], self.times[-1]
        keep = self.times >= t0 + start_fraction * (t1 - t0) - 1e-12 * max(abs(t1), 1.0)
        return TrajectoryRecord(*(getattr(self, f.name)[keep] for f in dataclasses.fields(self)))


def _check_params(domain, params):
    _check_length(domain, params.forcing)


def nonlinear_term(domain: SpectralDomain, coeffs) -> np.ndarray:
    """Galerkin coefficients of Pi (u . grad) u (exact, truncated to the basis)."""
    coeffs = _check_length(domain, coeffs)
    return triad_table(domain).apply(coeffs)


class _Stepper:
    """Precomputed diagonals for the CN / Heun IMEX step at a fixed dt."""

    def __init__(self, domain, params, dt):
        domain.require_torus()
        _check_params(domain, params)
        if not dt > 0:
            raise InvalidArgument(f"dt must be positive, got {dt!r}")
        lam = np.asarray(domain.eigenvalues)
        self.table = triad_table(domain)
        self.mass = params.epsilon + lam**params.s
        rate = params.nu * lam / self.mass
        self.keep = 1.0 - 0.5 * dt * rate
        self.solve = 1.0 / (1.0 + 0.5 * dt * rate)
        self.hw = params.forcing / self.mass
        self.dt = dt

    def explicit(self, u):
        return self.hw - self.table.apply(u) / self.mass

    def __call__(self, u):
        # trapezoidal on -nu A, Heun (explicit trapezoidal) on h - B(u)
        f0 = self.explicit(u)
        base = self.keep * u
        pred = (base + self.dt * f0) * self.solve
        return (base + 0.5 * self.dt * (f0 + self.explicit(pred))) * self.solve


def step(state: GalerkinState, params: PhysicalParams, domain: SpectralDomain,
         dt: float) -> GalerkinState:
    """Advance one step of the second-order IMEX scheme."""
    u = _Stepper(domain, params, dt)(_check_length(domain, state.coeffs))
    t = state.time + dt
    if not np.all(np.isfinite(u)):
        raise NumericalBlowup(t)
    return GalerkinState(time=t, coeffs=u)


def _diagnostics(domain, params, coeffs):
    lam = np.asarray(domain.eigenvalues)
    sq = coeffs**2
    energy = sq.sum(axis=-1)
    voigt = (sq * (1.0 + params.alpha**params.s * lam**params.s)).sum(axis=-1)
    enstrophy = (sq * lam).sum(axis=-1)
    pairing = coeffs @ params.forcing
    return energy, voigt, enstrophy, pairing


def simulate(u0: GalerkinState, params: PhysicalParams, domain: SpectralDomain,
             t_final: float, dt: float, sample_every: int = 1) -> TrajectoryRecord:
    """Integrate to ``t_final`` and record every ``sample_every``-th state.

    The number of steps is round((t_final - t0) / dt); sample times are
    t0 + k dt exactly, so reruns are bit-identical.
    """
    if not t_final > u0.time:
        raise InvalidArgument("t_final must exceed the initial time")
    if not (isinstance(sample_every, (int, np.integer)) and sample_every >= 1):
        raise InvalidArgument(f"sample_every must be a positive integer, got {sample_every!r}")
    stepper = _Stepper(domain, params, dt)
    n_steps = int(round((t_final - u0.time) / dt))
    u = np.array(_check_length(domain, u0.coeffs), dtype=float)
    samples = [u.copy()]
    times = [u0.time]
    for k in range(1, n_steps + 1):
        u = stepper(u)
        if k % sample_every == 0:
            if not np.all(np.isfinite(u)):
                raise NumericalBlowup(u0.time + k * dt)
            samples.append(u.copy())
            times.append(u0.time + k * dt)
    if not np.all(np.isfinite(u)):
        raise NumericalBlowup(u0.time + n_steps * dt)
    coeffs = np.array(samples)
    times = np.array(times)
    with np.errstate(over="ignore", invalid="ignore"):
        diag = _diagnostics(domain, params, coeffs)
    bad = ~np.all(np.isfinite(np.array(diag)), axis=0)
    if bad.any():
        # finite coefficients whose energies overflow
        raise NumericalBlowup(times[int(np.argmax(bad))])
    return TrajectoryRecord(times, coeffs, *diag)


@dataclasses.dataclass(frozen=True)
class EnergyResidual:
    times: np.ndarray
    residual: np.ndarray
    max_abs: float


def energy_residual(traj: TrajectoryRecord, params: PhysicalParams) -> EnergyResidual:
    """Pointwise defect of the energy identity along a sampled trajectory.

    At each interior sample,
    ``(1/2) d/dtau [eps |u|^2 + |u|^2_{V^s}] + nu |grad u|^2 - <h, u>``
    with the derivative taken by centered differences.  The bracket equals
    alpha^(-s) times the recorded Voigt energy.
    """
    if len(traj) < 3:
        raise InvalidArgument("energy residual needs at least 3 samples")
    dts = np.diff(traj.times)
    if np.max(np.abs(dts - dts[0])) > 1e-9 * dts[0]:
        raise InvalidArgument("trajectory is not uniformly sampled")
    scaled = traj.voigt_energy * params.alpha ** (-params.s)
    ddt = (scaled[2:] - scaled[:-2]) / (2.0 * dts[0])
    res = 0.5 * ddt + params.nu * traj.enstrophy[1:-1] - traj.forcing_pairing[1:-1]
    return EnergyResidual(traj.times[1:-1], res, float(np.max(np.abs(res))))


def _time_average(times, values):
    if len(times) == 1:
        return float(values[0])
    return float(np.trapezoid(values, times) / (times[-1] - times[0]))


@dataclasses.dataclass(frozen=True)
class EnstrophyCheck:
    ratio: float
    passed: bool
    zero_forcing: bool
    window: tuple
    tolerance: float


def mean_enstrophy_check(traj: TrajectoryRecord, params: PhysicalParams,
                         domain: SpectralDomain, transient_fraction: float = 0.5,
                         tolerance: float = 1e-3) -> EnstrophyCheck:
    """Time-averaged enstrophy relative to |h|^2 / (nu^2 lambda_1).

    The average runs over the samples after ``transient_fraction`` of the
    run.  With h = 0 the ratio is reported as 0 and ``zero_forcing`` is set.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise InvalidArgument("transient_fraction must lie in [0, 1)")
    w = traj.window(transient_fraction)
    if len(w) == 0:
        raise InvalidArgument("post-transient window is empty")
    window = (float(w.times[0]), float(w.times[-1]))
    h2 = float(params.forcing @ params.forcing)
    if h2 == 0.0:
        return EnstrophyCheck(0.0, True, True, window, tolerance)
    avg = _time_average(w.times, w.enstrophy)
    ratio = avg * params.nu**2 * float(domain.eigenvalues[0]) / h2
    return EnstrophyCheck(ratio, ratio <= 1.0 + tolerance, False, window, tolerance)


# --- seeded random data -----------------------------------------------------

def rng_for(seed: int) -> np.random.Generator:
    """PCG64 generator; every stochastic input in the package goes through here."""
    if seed is None:
        raise InvalidArgument("an explicit integer seed is required")
    return np.random.Generator(np.random.PCG64(int(seed)))


def voigt_norm(domain, params, coeffs) -> float:
    lam = np.asarray(domain.eigenvalues)
    return math.sqrt(float(np.sum(coeffs**2 * (1.0 + params.alpha**params.s * lam**params.s))))


def random_state(domain: SpectralDomain, params: PhysicalParams, radius: float,
                 seed: int) -> np.ndarray:
    """Gaussian coefficients rescaled to the given Voigt-norm radius."""
    x = rng_for(seed).standard_normal(domain.mode_count)
    if radius == 0:
        return np.zeros(domain.mode_count)
    return x * (radius / voigt_norm(domain, params, x))


def random_forcing(domain: SpectralDomain, l2_norm: float, seed: int,
                   n_modes: Optional[int] = None) -> np.ndarray:
    """Gaussian forcing on the lowest ``n_modes`` modes with the given L^2 norm."""
    m = domain.mode_count if n_modes is None else int(n_modes)
    if not 1 <= m <= domain.mode_count:
        raise InvalidArgument(f"n_modes must lie in [1, {domain.mode_count}], got {n_modes!r}")
    h = np.zeros(domain.mode_count)
    h[:m] = rng_for(seed).standard_normal(m)
    return h * (l2_norm / np.linalg.norm(h)) if l2_norm else h * 0.0


def mode_forcing(domain: SpectralDomain, amplitude: float, index: int = 0) -> np.ndarray:
    h = np.zeros(domain.mode_count)
    h[index] = amplitude
    return h


@dataclasses.dataclass(frozen=True)
class AbsorbingReport:
    radii: list
    final_voigt_energy: list
    spread: float
    passed: bool


def absorbing_check(params: PhysicalParams, domain: SpectralDomain, radii: Sequence[float],
                    t_final: float, dt: float, seed: int = 0, band: float = 0.1,
                    zero_forcing_floor: float = 1e-8) -> AbsorbingReport:
    """Run from random states of each Voigt radius and compare the end points.

    ``spread`` is max/min - 1 of the final Voigt energies; the check passes
    when it is within ``band``.  With h = 0 it passes when every final energy
    is below ``zero_forcing_floor``.
    """
    finals = []
    for n, r in enumerate(radii):
        u0 = random_state(domain, params, float(r), seed + n)
        traj = simulate(GalerkinState(0.0, u0), params, domain, t_final, dt,
                        sample_every=max(1, int(round(t_final / dt))))
        finals.append(float(traj.voigt_energy[-1]))
    finals_arr = np.array(finals)
    if params.forcing_norm == 0.0:
        return AbsorbingReport(list(radii), finals, float(finals_arr.max()),
                               bool(np.all(finals_arr < zero_forcing_floor)))
    spread = float(finals_arr.max() / finals_arr.min() - 1.0)
    return AbsorbingReport(list(radii), finals, spread, spread <= band)
