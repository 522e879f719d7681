"""Orthonormal families and the spectral inequalities they satisfy.

A family is an (N, M) array of eigenbasis coefficients together with a
diagonal metric tag.  Each inequality check returns signed margins
(right-hand side minus left-hand side), so a positive margin means the
inequality holds.  On a torus the constants were derived for a different
boundary condition, so margins are findings and are never raised as errors.

Quadrature notes: the density rho = sum_i |theta_i|^2 is a trigonometric
polynomial of degree 2 kmax, so rho^2 and rho^3 are integrated exactly on
uniform grids of 4 kmax + 1 and 6 kmax + 1 points per side.  |theta|^3 is
not a polynomial; its integral is taken on grids n and 2n and combined by
fourth-order Richardson extrapolation, and the n -> 2n change is reported.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Optional, Sequence

import numpy as np

from .constants import c_s_clr, constant_set
from .errors import InvalidArgument
from .galerkin import rng_for
from .spectral_domain import SpectralDomain, evaluate_field, grid_integral

SUBORTHO_TOL = 1e-12


@dataclasses.dataclass(frozen=True)
class Metric:
    """Diagonal inner product sum_k w_k u_k v_k on eigenbasis coefficients.

    kinds: ``L2`` (w = 1), ``H1`` (w = lambda), ``HsA`` (w = lambda^s),
    ``VsAlpha`` (w = eps + lambda^s) and ``sum`` (a1^2 w1 + a2^2 w2).
    """

    kind: str
    s: Optional[float] = None
    epsilon: Optional[float] = None
    parts: tuple = ()

    @classmethod
    def L2(cls):
        return cls("L2")

    @classmethod
    def H1(cls):
        return cls("H1")

    @classmethod
    def HsA(cls, s):
        return cls("HsA", s=float(s))

    @classmethod
    def VsAlpha(cls, epsilon, s):
        return cls("VsAlpha", s=float(s), epsilon=float(epsilon))

    @classmethod
    def weighted_sum(cls, a1, m1, a2, m2):
        if not (a1 > 0 and a2 > 0):
            raise InvalidArgument("weighted-sum coefficients must be positive")
        return cls("sum", parts=((float(a1), m1), (float(a2), m2)))

    def weights(self, domain: SpectralDomain) -> np.ndarray:
        lam = np.asarray(domain.eigenvalues, dtype=float)
        if self.kind == "L2":
            return np.ones_like(lam)
        if self.kind == "H1":
            return lam.copy()
        if self.kind == "HsA":
            return lam**self.s
        if self.kind == "VsAlpha":
            return self.epsilon + lam**self.s
        if self.kind == "sum":
            return sum(a * a * m.weights(domain) for a, m in self.parts)
        raise InvalidArgument(f"unknown metric kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "HsA":
            return f"HsA({self.s:g})"
        if self.kind == "VsAlpha":
            return f"VsAlpha({self.epsilon:g},{self.s:g})"
        if self.kind == "sum":
            return " + ".join(f"{a:g}^2 {m.label()}" for a, m in self.parts)
        return self.kind


@dataclasses.dataclass(frozen=True, eq=False)
class OrthFamily:
    vectors: np.ndarray
    metric: Metric

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def gram(self, domain, metric: Optional[Metric] = None) -> np.ndarray:
        w = (metric or self.metric).weights(domain)
        return (self.vectors * w) @ self.vectors.T

    def scaled(self, factor: float) -> "OrthFamily":
        return OrthFamily(self.vectors * factor, self.metric)

    def retagged(self, metric: Metric) -> "OrthFamily":
        return OrthFamily(self.vectors, metric)


def _check_n(domain, n):
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= domain.mode_count):
        raise InvalidArgument(f"N must lie in [1, {domain.mode_count}], got {n!r}")


def orthonormalize(domain, raw, metric: Metric) -> OrthFamily:
    """QR in the metric: rows of the result span the rows of ``raw``."""
    raw = np.atleast_2d(np.asarray(raw, dtype=float))
    root = np.sqrt(metric.weights(domain))
    q, r = np.linalg.qr((raw * root).T)
    q = q * np.sign(np.diag(r))[None, :]
    return OrthFamily(np.ascontiguousarray(q.T / root), metric)


def random_orthonormal(domain: SpectralDomain, n: int, metric: Metric, seed: int) -> OrthFamily:
    """Orthonormalized Gaussian coefficient vectors (PCG64 seeded with ``seed``)."""
    _check_n(domain, n)
    raw = rng_for(seed).standard_normal((n, domain.mode_count))
    return orthonormalize(domain, raw, metric)


def eigenmode_family(domain: SpectralDomain, n: int, metric: Metric) -> OrthFamily:
    """The ``n`` lowest eigenmodes, normalized in ``metric``."""
    _check_n(domain, n)
    w = metric.weights(domain)
    v = np.zeros((n, domain.mode_count))
    v[np.arange(n), np.arange(n)] = 1.0 / np.sqrt(w[:n])
    return OrthFamily(v, metric)


def max_gram_eigenvalue(family: OrthFamily, domain, metric: Optional[Metric] = None) -> float:
    return float(np.linalg.eigvalsh(family.gram(domain, metric))[-1])


def is_suborthonormal(family: OrthFamily, domain: SpectralDomain,
                      metric: Optional[Metric] = None):
    """(ok, largest Gram eigenvalue) in the family's metric or ``metric``."""
    top = max_gram_eigenvalue(family, domain, metric)
    return top <= 1.0 + SUBORTHO_TOL, top


def summand_family(family: OrthFamily, index: int) -> OrthFamily:
    """Family orthonormal in a1^2 H1 + a2^2 H2 rescaled by a_index, tagged H_index."""
    if family.metric.kind != "sum":
        raise InvalidArgument("family is not tagged with a weighted-sum metric")
    a, m = family.metric.parts[index]
    return OrthFamily(family.vectors * a, m)


# --- grid quantities ----------------------------------------------------------

def _require_grid(domain, n, need, what):
    if n < need:
        raise InvalidArgument(f"grid of {n} points per side is too coarse for {what} "
                              f"(need >= {need})")


def _density(domain, vectors, n, chunk=16):
    rho = np.zeros((n, n, n))
    for start in range(0, len(vectors), chunk):
        f = evaluate_field(domain, vectors[start:start + chunk], n)
        rho += np.einsum("fcxyz,fcxyz->xyz", f, f)
    return rho


def gradient_sum(domain, vectors) -> float:
    """R = sum_i |grad theta_i|^2 = sum_i sum_k lambda_k v_ik^2 (exact)."""
    return float(np.sum(vectors**2 * np.asarray(domain.eigenvalues)))


@dataclasses.dataclass(frozen=True)
class RhoNorms:
    integral: float
    l2: float
    l3: float
    lp: Optional[float]
    p: Optional[float]
    R: float
    grid: int


def rho_norms(domain: SpectralDomain, family: OrthFamily, grid_per_dim: Optional[int] = None,
              p: Optional[float] = None) -> RhoNorms:
    """Norms of rho(x) = sum_i |theta_i(x)|^2.

    The integral and L^2 norm use ``grid_per_dim`` (default 4 kmax + 1, the
    minimum); the L^3 norm uses max(grid_per_dim, 6 kmax + 1) so it is exact.
    An optional extra L^p norm is a plain grid value.
    """
    domain.require_torus()
    need = 4 * domain.kmax + 1
    n = need if grid_per_dim is None else int(grid_per_dim)
    _require_grid(domain, n, need, "rho^2")
    rho = _density(domain, family.vectors, n)
    integral = grid_integral(domain, rho)
    l2 = math.sqrt(grid_integral(domain, rho**2))
    n3 = max(n, 6 * domain.kmax + 1)
    rho3 = rho if n3 == n else _density(domain, family.vectors, n3)
    l3 = grid_integral(domain, rho3**3) ** (1.0 / 3.0)
    lp = grid_integral(domain, rho**p) ** (1.0 / p) if p is not None else None
    return RhoNorms(integral, l2, l3, lp, p, gradient_sum(domain, family.vectors), n)


@dataclasses.dataclass(frozen=True)
class L3Squares:
    """sum_k |theta_k|_{L^3}^2 with its quadrature diagnostic."""

    value: float
    coarse: float
    fine: float
    refinement: float
    grid: int


def _cube_integrals(domain, vectors, n, chunk=8):
    out = []
    for start in range(0, len(vectors), chunk):
        f = evaluate_field(domain, vectors[start:start + chunk], n)
        out.append(grid_integral(domain, np.sum(f * f, axis=1) ** 1.5))
    return np.concatenate([np.atleast_1d(x) for x in out])


def l3_square_sum(domain: SpectralDomain, vectors, grid_per_dim: Optional[int] = None) -> L3Squares:
    """sum_k (int |theta_k|^3)^(2/3) with Richardson extrapolation on n, 2n."""
    domain.require_torus()
    n = 16 * domain.kmax if grid_per_dim is None else int(grid_per_dim)
    _require_grid(domain, n, 2 * domain.kmax + 1, "field evaluation")
    vectors = np.atleast_2d(vectors)
    coarse = _cube_integrals(domain, vectors, n)
    fine = _cube_integrals(domain, vectors, 2 * n)
    extrap = fine + (fine - coarse) / 15.0
    value = float(np.sum(np.abs(extrap) ** (2.0 / 3.0)))
    c = float(np.sum(coarse ** (2.0 / 3.0)))
    f = float(np.sum(fine ** (2.0 / 3.0)))
    return L3Squares(value, c, f, abs(f - c) / max(abs(f), 1e-300), n)


# --- inequality checks ----------------------------------------------------------

def _require_sub(family, domain, metric, name):
    ok, top = is_suborthonormal(family, domain, metric)
    if not ok:
        raise InvalidArgument(f"{name} needs a family suborthonormal in {metric.label()}; "
                              f"largest Gram eigenvalue is {top!r}")


@dataclasses.dataclass(frozen=True)
class Margin:
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def lt_rhs(R: float) -> float:
    c = constant_set()
    return c.c_lt**0.375 * c.c_sob6**0.75 * R**0.75


def check_lt(domain: SpectralDomain, family: OrthFamily, grid_per_dim=None) -> Margin:
    """|rho|_{L^2} <= C_LT^{3/8} C_Sob6^{3/4} R^{3/4} for an L^2-suborthonormal family."""
    _require_sub(family, domain, Metric.L2(), "check_lt")
    norms = rho_norms(domain, family, grid_per_dim)
    return Margin(norms.l2, lt_rhs(norms.R))


def clr_small_rhs(s, n, R, mode="best"):
    c = constant_set()
    cs = c_s_clr(s, mode)
    return (c.c_sob6 ** ((3 - 4 * s) / (2 * (1 - s))) * cs ** (1 / (4 * (1 - s)))
            * n ** ((3 - 2 * s) / (12 * (1 - s))) * R ** ((3 - 4 * s) / (4 * (1 - s))))


def clr_big_rhs(s, n, volume, mode="best"):
    return c_s_clr(s, mode) * volume ** (2 * s / 3 - 0.5) * n ** (1 - 2 * s / 3)


@dataclasses.dataclass(frozen=True)
class ClrMargins:
    """Margins against the two CLR-type L^2 bounds; a branch is None off its range."""

    s: float
    lhs: float
    small: Optional[Margin]
    big: Optional[Margin]
    mode: str

    @property
    def min_margin(self) -> float:
        return min(m.margin for m in (self.small, self.big) if m is not None)


def check_clr(domain: SpectralDomain, family: OrthFamily, s: float, mode: str = "best",
              grid_per_dim=None) -> ClrMargins:
    """|rho|_{L^2} against the s <= 3/4 and s >= 3/4 CLR-type bounds."""
    if not 0.5 <= s <= 1.0:
        raise InvalidArgument(f"s must lie in [1/2, 1], got {s!r}")
    _require_sub(family, domain, Metric.HsA(s), "check_clr")
    norms = rho_norms(domain, family, grid_per_dim)
    small = Margin(norms.l2, clr_small_rhs(s, family.n, norms.R, mode)) if s <= 0.75 else None
    big = Margin(norms.l2, clr_big_rhs(s, family.n, domain.volume, mode)) if s >= 0.75 else None
    return ClrMargins(s, norms.l2, small, big, mode)


def minmax_rhs(domain, s, n):
    c = constant_set()
    return (1.5 * c.c_sob6 * domain.volume ** (2.0 / 3.0 * (s - 0.5))
            * c.c_bly ** (0.5 - s) * n ** (2.0 / 3.0 * (2.0 - s)))


def minmax_intermediate(domain, epsilon, s, n):
    """C_Sob3^2 times the sum of the n largest lambda^(1/2) / (eps + lambda^s)."""
    lam = np.asarray(domain.eigenvalues, dtype=float)
    vals = np.sort(np.sqrt(lam) / (epsilon + lam**s))[::-1]
    return constant_set().c_sob3**2 * math.fsum(vals[:n])


@dataclasses.dataclass(frozen=True)
class MinmaxEntry:
    construction: str
    seed: Optional[int]
    lhs: float
    rhs: float
    intermediate: float
    refinement: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def intermediate_margin(self) -> float:
        return self.intermediate - self.lhs


def minmax_family(domain, epsilon, s, base: OrthFamily) -> np.ndarray:
    """theta_k = (eps + A^s)^(-1/2) theta_bar_k in coefficients."""
    lam = np.asarray(domain.eigenvalues, dtype=float)
    return base.vectors / np.sqrt(epsilon + lam**s)


def check_minmax(domain: SpectralDomain, epsilon: float, s: float, n: int,
                 seeds: Sequence[int] = (), grid_per_dim=None) -> list:
    """Min-max L^3 estimate for the eigenmode family and seeded random families.

    Returns one ``MinmaxEntry`` per construction: ``eigenmodes`` first, then
    ``random`` for each seed.
    """
    _check_n(domain, n)
    if not 0.5 <= s <= 1.0:
        raise InvalidArgument(f"s must lie in [1/2, 1], got {s!r}")
    if not epsilon >= 0:
        raise InvalidArgument(f"epsilon must be nonnegative, got {epsilon!r}")
    rhs = minmax_rhs(domain, s, n)
    mid = minmax_intermediate(domain, epsilon, s, n)
    bases = [("eigenmodes", None, eigenmode_family(domain, n, Metric.L2()))]
    bases += [("random", int(k), random_orthonormal(domain, n, Metric.L2(), int(k))) for k in seeds]
    out = []
    for label, seed, base in bases:
        l3 = l3_square_sum(domain, minmax_family(domain, epsilon, s, base), grid_per_dim)
        out.append(MinmaxEntry(label, seed, l3.value, rhs, mid, l3.refinement))
    return out


def single_mode_l3_square(domain: SpectralDomain, epsilon: float, s: float, index: int = 0) -> float:
    """Closed form of |theta|_{L^3}^2 for theta = (eps + A^s)^(-1/2) e_index.

    |e|^3 = (2/|box|)^(3/2) |cos|^3 and the box average of |cos|^3 is 4 / (3 pi).
    """
    lam = float(domain.eigenvalues[index])
    cube = domain.volume * (2.0 / domain.volume) ** 1.5 * 4.0 / (3.0 * math.pi)
    return cube ** (2.0 / 3.0) / (epsilon + lam**s)


def single_mode_rho_l2(domain: SpectralDomain) -> float:
    """|rho|_{L^2} for one L^2-normalized mode: rho = (2/|box|) cos^2, mean of cos^4 = 3/8."""
    return math.sqrt(domain.volume * (2.0 / domain.volume) ** 2 * 0.375)
