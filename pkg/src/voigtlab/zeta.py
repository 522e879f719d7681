"""Partial spectral sums zeta, zeta-hat and their lower bounds.

    zeta(alpha, s, N)     = sum_{k<=N} lambda_k / (1 + (alpha lambda_k)^s)
    zeta_hat(alpha, s, N) = sum_{k<=N} lambda_k / (alpha^-s + lambda_k^s)
                          = alpha^s zeta(alpha, s, N)

Sums are accumulated with compensation (``math.fsum`` for single values,
a Neumaier prefix sum for sweeps) so margin signs near zero can be trusted.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np

from . import kernels
from .constants import constant_set
from .errors import InvalidArgument
from .spectral_domain import SpectralDomain


@dataclasses.dataclass(frozen=True)
class ZetaQuery:
    alpha: float
    s: float
    n: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidArgument(f"alpha must be positive, got {self.alpha!r}")
        if not 0.0 <= self.s <= 1.0:
            raise InvalidArgument(f"s must lie in [0, 1], got {self.s!r}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise InvalidArgument(f"n must be a positive integer, got {self.n!r}")


def _head(domain, q):
    if q.n > domain.mode_count:
        raise InvalidArgument(f"n = {q.n} exceeds mode_count = {domain.mode_count}")
    return np.asarray(domain.eigenvalues[: q.n], dtype=float)


def _zeta_terms(lam, alpha, s):
    return lam / (1.0 + (alpha * lam) ** s)


def _zeta_hat_terms(lam, alpha, s):
    return lam / (alpha ** (-s) + lam**s)


def zeta(domain: SpectralDomain, q: ZetaQuery) -> float:
    return math.fsum(_zeta_terms(_head(domain, q), q.alpha, q.s))


def zeta_hat(domain: SpectralDomain, q: ZetaQuery, rtol: float = 1e-12) -> float:
    """alpha^s zeta, cross-checked against the direct sum to ``rtol``."""
    via_zeta = q.alpha**q.s * zeta(domain, q)
    direct = math.fsum(_zeta_hat_terms(_head(domain, q), q.alpha, q.s))
    if abs(via_zeta - direct) > rtol * abs(direct):
        raise ArithmeticError(
            f"zeta_hat paths disagree: {via_zeta!r} vs {direct!r} for {q}")
    return via_zeta


def g1_of(alpha: float, volume: float) -> float:
    return alpha * volume ** (-2.0 / 3.0)


def _bounds(volume, alpha, s, n):
    """Printed lower bounds at N = n (array-friendly in n)."""
    c = constant_set().c_bly
    g1 = g1_of(alpha, volume)
    beta = c**s * g1**s
    n = np.asarray(n, dtype=float)
    expo = (5.0 - 2.0 * s) / 3.0
    gest = 0.6 * c * volume ** (-2.0 / 3.0) / (1.0 + beta) * n**expo
    ggest = 0.3 * c * volume ** (-2.0 / 3.0) * n ** (5.0 / 3.0)
    gest1 = 0.6 * volume ** (-2.0 * (1.0 - s) / 3.0) * c * g1**s / (1.0 + beta) * n**expo
    gate = c * g1 * n ** (2.0 / 3.0) <= 1.0
    return gest, ggest, gest1, gate


@dataclasses.dataclass(frozen=True)
class ZetaMargins:
    """computed sum - printed lower bound; ``ggest_margin`` is None off its gate."""

    zeta: float
    zeta_hat: float
    gest_margin: float
    ggest_margin: Optional[float]
    gest1_margin: float
    g1: float


def zeta_lower_bound_margins(domain: SpectralDomain, q: ZetaQuery) -> ZetaMargins:
    z = zeta(domain, q)
    zh = zeta_hat(domain, q)
    gest, ggest, gest1, gate = _bounds(domain.volume, q.alpha, q.s, q.n)
    return ZetaMargins(
        zeta=z,
        zeta_hat=zh,
        gest_margin=z - float(gest),
        ggest_margin=z - float(ggest) if bool(gate) else None,
        gest1_margin=zh - float(gest1),
        g1=g1_of(q.alpha, domain.volume),
    )


@dataclasses.dataclass(frozen=True)
class ZetaSweep:
    """Columns over N = 1..n_max; ``ggest_margin`` is NaN where its gate fails."""

    n: np.ndarray
    zeta: np.ndarray
    zeta_hat: np.ndarray
    gest_margin: np.ndarray
    ggest_margin: np.ndarray
    gest1_margin: np.ndarray
    ggest_gate: np.ndarray


def zeta_sweep(domain: SpectralDomain, alpha: float, s: float, n_max: int) -> ZetaSweep:
    """All margins for every N up to ``n_max`` at one (alpha, s)."""
    q = ZetaQuery(alpha, s, n_max)
    lam = _head(domain, q)
    z = kernels.kahan_cumsum(_zeta_terms(lam, alpha, s))
    zh = kernels.kahan_cumsum(_zeta_hat_terms(lam, alpha, s))
    n = np.arange(1, n_max + 1)
    gest, ggest, gest1, gate = _bounds(domain.volume, alpha, s, n)
    return ZetaSweep(n=n, zeta=z, zeta_hat=zh, gest_margin=z - gest,
                     ggest_margin=np.where(gate, z - ggest, np.nan),
                     gest1_margin=zh - gest1, ggest_gate=gate)


def default_alpha_grid(points: int = 13, low: float = 1e-3, high: float = 1e3) -> np.ndarray:
    return np.logspace(math.log10(low), math.log10(high), points)


def default_s_grid() -> np.ndarray:
    return np.round(np.linspace(0.5, 1.0, 11), 12)
