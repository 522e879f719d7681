"""Explicit eigenbases standing in for the Stokes operator.

Two kinds of domain are provided:

``torus``
    Real divergence-free Fourier modes on the periodic box [0, L]^3 with zero
    mean.  Each retained wavevector pair +-k carries two polarizations and a
    cos and a sin phase, so all coefficient vectors are real.  Modes are
    normalized in L^2(box): e(x) = sqrt(2/|box|) a cos(2 pi k.x / L).
``synthetic``
    The eigenvalue sequence that saturates the Berezin-Li-Yau bound,
    lambda_k = C_BLY |box|^(-2/3) k^(2/3).  There are no modes, so nothing
    that needs the nonlinearity can run on it.
"""
from __future__ import annotations

import dataclasses
import json
import math
from typing import Optional

import numpy as np

from . import kernels
from .constants import constant_set
from .errors import InvalidArgument, UnsupportedOperation

COS, SIN = 0, 1


def _frozen(a, dtype=None):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralDomain:
    """Eigenvalues and (for the torus) per-mode metadata.

    Per-mode arrays on a torus domain, all of length ``mode_count``:
    ``wavevectors`` (integer, the representative of the +-k pair with its
    first nonzero entry positive), ``polarizations`` (unit vectors),
    ``polarizations_int`` (the integer vectors they were normalized from),
    ``pol_index`` (0 or 1) and ``phases`` (``COS`` or ``SIN``).
    """

    kind: str
    volume: float
    eigenvalues: np.ndarray
    side_length: Optional[float] = None
    kmax: Optional[int] = None
    wavevectors: Optional[np.ndarray] = None
    polarizations: Optional[np.ndarray] = None
    polarizations_int: Optional[np.ndarray] = None
    pol_index: Optional[np.ndarray] = None
    phases: Optional[np.ndarray] = None

    @property
    def mode_count(self) -> int:
        return len(self.eigenvalues)

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    @property
    def wavenumber_scale(self) -> float:
        """2 pi / L, the factor between integer and physical wavevectors."""
        self.require_torus()
        return 2.0 * math.pi / self.side_length

    @property
    def normalization(self) -> float:
        return math.sqrt(2.0 / self.volume)

    def require_torus(self):
        if not self.is_torus:
            raise UnsupportedOperation(
                f"operation needs wavevector metadata; domain kind is {self.kind!r}")

    def to_json(self) -> str:
        doc = {"kind": self.kind, "volume": self.volume,
               "eigenvalues": [float(x) for x in self.eigenvalues]}
        if self.is_torus:
            doc["side_length"] = self.side_length
            doc["kmax"] = self.kmax
            doc["wavevectors"] = self.wavevectors.tolist()
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "SpectralDomain":
        doc = json.loads(text)
        if doc["kind"] == "torus":
            return build_torus_basis(doc["side_length"], doc["kmax"])
        if doc["kind"] == "synthetic":
            return build_synthetic_basis(len(doc["eigenvalues"]), doc["volume"])
        raise InvalidArgument(f"unknown domain kind {doc['kind']!r}")


def _representative(k):
    for c in k:
        if c != 0:
            return tuple(k) if c > 0 else tuple(-x for x in k)
    raise InvalidArgument("zero wavevector has no representative")


def _integer_polarizations(k):
    """Two mutually orthogonal integer vectors orthogonal to ``k``."""
    k = np.asarray(k, dtype=np.int64)
    axis = int(np.argmin(np.abs(k)))
    e = np.zeros(3, dtype=np.int64)
    e[axis] = 1
    a1 = np.cross(k, e)
    a2 = np.cross(k, a1)
    return a1, a2


def wavevector_representatives(kmax: int):
    """Sorted representatives of +-k pairs with 0 < |k| <= kmax."""
    reps = []
    r = range(-kmax, kmax + 1)
    for kx in r:
        for ky in r:
            for kz in r:
                k = (kx, ky, kz)
                n2 = kx * kx + ky * ky + kz * kz
                if 0 < n2 <= kmax * kmax and _representative(k) == k:
                    reps.append(k)
    reps.sort(key=lambda k: (k[0] ** 2 + k[1] ** 2 + k[2] ** 2, k))
    return reps


def build_torus_basis(side_length: float, kmax: int) -> SpectralDomain:
    """Divergence-free real Fourier basis with wavevectors 0 < |k| <= kmax.

    Eigenvalues are (2 pi / L)^2 |k|^2; degenerate modes are ordered by
    wavevector, then polarization, then phase (cos before sin).
    """
    if not (isinstance(kmax, (int, np.integer)) and kmax >= 1):
        raise InvalidArgument(f"kmax must be a positive integer, got {kmax!r}")
    if not side_length > 0:
        raise InvalidArgument(f"side_length must be positive, got {side_length!r}")
    side_length = float(side_length)
    scale2 = (2.0 * math.pi / side_length) ** 2
    wv, pol, pol_int, pidx, ph, lam = [], [], [], [], [], []
    for k in wavevector_representatives(int(kmax)):
        a_int = _integer_polarizations(k)
        n2 = k[0] ** 2 + k[1] ** 2 + k[2] ** 2
        for p, a in enumerate(a_int):
            unit = a / math.sqrt(float(a @ a))
            for phase in (COS, SIN):
                wv.append(k)
                pol.append(unit)
                pol_int.append(a)
                pidx.append(p)
                ph.append(phase)
                lam.append(scale2 * n2)
    return SpectralDomain(
        kind="torus",
        volume=side_length**3,
        eigenvalues=_frozen(lam, float),
        side_length=side_length,
        kmax=int(kmax),
        wavevectors=_frozen(wv, np.int64),
        polarizations=_frozen(pol, float),
        polarizations_int=_frozen(pol_int, np.int64),
        pol_index=_frozen(pidx, np.int64),
        phases=_frozen(ph, np.int64),
    )


def bly_sequence(count: int, volume: float) -> np.ndarray:
    k = np.arange(1, count + 1, dtype=float)
    return constant_set().c_bly * volume ** (-2.0 / 3.0) * k ** (2.0 / 3.0)


def build_synthetic_basis(count: int, volume: float) -> SpectralDomain:
    """Domain whose spectrum is exactly the Berezin-Li-Yau extremal sequence."""
    if not (isinstance(count, (int, np.integer)) and count >= 1):
        raise InvalidArgument(f"count must be a positive integer, got {count!r}")
    if not volume > 0:
        raise InvalidArgument(f"volume must be positive, got {volume!r}")
    return SpectralDomain(kind="synthetic", volume=float(volume),
                          eigenvalues=_frozen(bly_sequence(int(count), float(volume))))


def _check_length(domain, coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != domain.mode_count:
        raise InvalidArgument(
            f"coefficient length {coeffs.shape[-1]} != mode_count {domain.mode_count}")
    return coeffs


def apply_fractional_power(domain: SpectralDomain, s: float, coeffs) -> np.ndarray:
    """Coefficients of A^s u: multiply mode k by lambda_k^s."""
    coeffs = _check_length(domain, coeffs)
    return coeffs * domain.eigenvalues**s


@dataclasses.dataclass(frozen=True)
class BlyMargins:
    """Signed Berezin-Li-Yau margins for k = 1..n (index k-1).

    ``mean`` compares the running mean of the first k eigenvalues with
    C_BLY |box|^(-2/3) k^(2/3); ``pointwise`` compares lambda_k itself.  The
    synthetic sequence has ``pointwise == 0`` identically, while its running
    mean sits near 3/5 of the bound.
    """

    mean: np.ndarray
    pointwise: np.ndarray


def check_bly(domain: SpectralDomain, n: int) -> BlyMargins:
    """Margins of the Berezin-Li-Yau inequality for the first ``n`` eigenvalues."""
    if not 1 <= n <= domain.mode_count:
        raise InvalidArgument(f"n must lie in [1, {domain.mode_count}], got {n}")
    lam = np.asarray(domain.eigenvalues[:n])
    k = np.arange(1, n + 1, dtype=float)
    bound = bly_sequence(n, domain.volume)
    means = kernels.kahan_cumsum(lam) / k
    return BlyMargins(mean=means - bound, pointwise=lam - bound)


# --- evaluation on a uniform grid -------------------------------------------

def _fourier_coefficients(domain, coeffs, n):
    """Complex Fourier array (3, n, n, n) whose inverse FFT gives the field.

    ``coeffs`` may be 1-D (one field) or 2-D (a stack of fields), in which
    case a leading axis is added to the result.
    """
    domain.require_torus()
    coeffs = _check_length(domain, coeffs)
    if n < 2 * domain.kmax + 1:
        raise InvalidArgument(f"grid of {n} points aliases modes with |k| <= {domain.kmax}")
    single = coeffs.ndim == 1
    stack = np.atleast_2d(coeffs)
    c = domain.normalization
    # cos(t) = (e^{it} + e^{-it}) / 2, sin(t) = (e^{it} - e^{-it}) / 2i
    plus = np.where(domain.phases == COS, 0.5 + 0j, -0.5j) * c
    amp = stack[:, :, None] * plus[None, :, None] * domain.polarizations[None, :, :]
    kp = np.mod(domain.wavevectors, n)
    km = np.mod(-domain.wavevectors, n)
    F = np.zeros((stack.shape[0], 3, n, n, n), dtype=complex)
    for comp in range(3):
        for sign_idx, conj in ((kp, False), (km, True)):
            vals = np.conj(amp[:, :, comp]) if conj else amp[:, :, comp]
            for r in range(stack.shape[0]):
                np.add.at(F[r, comp], (sign_idx[:, 0], sign_idx[:, 1], sign_idx[:, 2]), vals[r])
    return (F[0] if single else F), kp, km


def _grid_wavenumbers(domain, n):
    m = np.fft.fftfreq(n, d=1.0 / n)
    scale = domain.wavenumber_scale
    kx, ky, kz = np.meshgrid(m, m, m, indexing="ij")
    return scale * kx, scale * ky, scale * kz


def evaluate_field(domain: SpectralDomain, coeffs, n: int) -> np.ndarray:
    """Velocity field on the n^3 grid x_j = L j / n, shape (3, n, n, n)."""
    F, _, _ = _fourier_coefficients(domain, coeffs, n)
    return np.real(np.fft.ifftn(F, axes=(-3, -2, -1))) * n**3


def evaluate_gradient(domain: SpectralDomain, coeffs, n: int) -> np.ndarray:
    """Velocity gradient on the grid, ``g[i, j] = d u_i / d x_j``, shape (3, 3, n, n, n).

    The Nyquist index never carries a retained mode because n > 2 kmax,
    so the fft-ordered frequency grid differentiates exactly.
    """
    F, _, _ = _fourier_coefficients(domain, coeffs, n)
    K = _grid_wavenumbers(domain, n)
    out = np.empty((3, 3, n, n, n))
    for j in range(3):
        out[:, j] = np.real(np.fft.ifftn(1j * K[j] * F, axes=(-3, -2, -1))) * n**3
    return out


def grid_integral(domain: SpectralDomain, values: np.ndarray) -> float:
    """Uniform-grid quadrature over the box (last three axes)."""
    n = values.shape[-1]
    total = np.sum(values, axis=(-3, -2, -1)) * (domain.volume / n**3)
    return float(total) if np.ndim(total) == 0 else total
