"""N-dimensional traces of the linearized flow and the volume-contraction exponent.

The linearization around u in scaled time is

    (eps + A^s) dv/dt = -nu A v - B'(u) v,

where B'(u) v = Pi((u . grad) v + (v . grad) u).  With W = eps + A^s the
operator L_u = W^{-1}(-nu A - B'(u)) is expressed in the basis
W^{-1/2} e_k, which is orthonormal for the inner product (W u1, u2).  In
that basis its matrix is -W^{-1/2} (nu Lambda + J) W^{-1/2}, and
Tr_N L_u is the sum of the N largest eigenvalues of its symmetric part.

For s = 1 the unscaled metric (u1, u2) + alpha (grad u1, grad u2) is also
available (``metric="unscaled"``); it uses W = 1 + alpha A and physical time.
"""
from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from .errors import InvalidArgument
from .galerkin import PhysicalParams, TrajectoryRecord
from .spectral_domain import SpectralDomain, _check_length
from .triads import triad_table

METRICS = ("scaled", "unscaled")


def _weights(domain, params, metric):
    lam = np.asarray(domain.eigenvalues)
    if metric == "scaled":
        return params.epsilon + lam**params.s
    if metric == "unscaled":
        if params.s != 1.0:
            raise InvalidArgument("the unscaled metric is defined for s = 1 only")
        return 1.0 + params.alpha * lam
    raise InvalidArgument(f"metric must be one of {METRICS}, got {metric!r}")


def jacobian(domain: SpectralDomain, coeffs) -> np.ndarray:
    """Galerkin matrix of v -> Pi((u . grad) v + (v . grad) u)."""
    return triad_table(domain).jacobian(_check_length(domain, coeffs))


def linearized_raw(domain: SpectralDomain, params: PhysicalParams, coeffs,
                   metric: str = "scaled") -> np.ndarray:
    """Matrix of L_u in the eigenbasis itself (not metric-orthonormal)."""
    w = _weights(domain, params, metric)
    lam = np.asarray(domain.eigenvalues)
    return -(np.diag(params.nu * lam) + jacobian(domain, coeffs)) / w[:, None]


def linearized_matrix(domain: SpectralDomain, params: PhysicalParams, coeffs,
                      metric: str = "scaled") -> np.ndarray:
    """Matrix of L_u in the basis orthonormal for the Voigt inner product.

    At u = 0 it is diag(-nu lambda_k / (eps + lambda_k^s)).
    """
    w = _weights(domain, params, metric)
    r = 1.0 / np.sqrt(w)
    lam = np.asarray(domain.eigenvalues)
    core = np.diag(params.nu * lam) + jacobian(domain, coeffs)
    return -(r[:, None] * core * r[None, :])


def _sym_spectrum(mat):
    """Eigenvalues of the symmetric part, largest first."""
    return np.linalg.eigvalsh(0.5 * (mat + mat.T))[::-1]


def trace_curve(domain: SpectralDomain, params: PhysicalParams, coeffs, n_max: Optional[int] = None,
                metric: str = "scaled") -> np.ndarray:
    """[Tr_1, ..., Tr_{n_max}] at one state (cumulative top eigenvalue sums)."""
    m = domain.mode_count
    n_max = m if n_max is None else int(n_max)
    if not 1 <= n_max <= m:
        raise InvalidArgument(f"N must lie in [1, {m}], got {n_max}")
    ev = _sym_spectrum(linearized_matrix(domain, params, coeffs, metric))
    return np.cumsum(ev[:n_max])


def trace_n(domain: SpectralDomain, params: PhysicalParams, coeffs, n: int,
            metric: str = "scaled") -> float:
    """Tr_N: sup over orthonormal N-frames of sum (L theta_k, theta_k)."""
    return float(trace_curve(domain, params, coeffs, n, metric)[-1])


def top_frame(domain, params, coeffs, n, metric="scaled") -> np.ndarray:
    """Orthonormal N-frame (columns) attaining Tr_N."""
    mat = linearized_matrix(domain, params, coeffs, metric)
    _, vecs = np.linalg.eigh(0.5 * (mat + mat.T))
    return vecs[:, ::-1][:, :n]


def frame_trace(mat, frame) -> float:
    """sum_k (L theta_k, theta_k) for the columns of ``frame``."""
    return float(np.einsum("ik,ij,jk->", frame, mat, frame))


@dataclasses.dataclass(frozen=True)
class TraceReport:
    n_values: list
    q_values: list
    q_first_half: list
    q_second_half: list
    n_star: Optional[int]
    averaging_window: tuple
    samples_used: int
    split_half_discrepancy: float
    low_confidence: bool
    metric: str = "scaled"


def _average(times, curves):
    if len(times) == 1:
        return curves[0]
    return np.trapezoid(curves, times, axis=0) / (times[-1] - times[0])


def q_curve(traj: TrajectoryRecord, domain: SpectralDomain, params: PhysicalParams, n_max: int,
            transient_fraction: float = 0.0, metric: str = "scaled",
            split_tolerance: float = 0.1) -> TraceReport:
    """Time-averaged Tr_N for N = 1..n_max over the post-transient samples.

    The split-half diagnostic averages the first and second halves of the
    window separately; ``split_half_discrepancy`` is
    max_N |q1(N) - q2(N)| / max_N |q(N)| and the report is flagged
    low-confidence when it exceeds ``split_tolerance``.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise InvalidArgument("transient_fraction must lie in [0, 1)")
    w = traj.window(transient_fraction)
    if len(w) < 1:
        raise InvalidArgument("averaging window is empty")
    curves = np.array([trace_curve(domain, params, u, n_max, metric) for u in w.coeffs])
    q = _average(w.times, curves)
    mid = len(w) // 2
    if len(w) >= 4:
        q1 = _average(w.times[: mid + 1], curves[: mid + 1])
        q2 = _average(w.times[mid:], curves[mid:])
    else:
        q1 = q2 = q
    scale = float(np.max(np.abs(q)))
    disc = float(np.max(np.abs(q1 - q2)) / scale) if scale > 0 else 0.0
    neg = np.nonzero(q < 0)[0]
    return TraceReport(
        n_values=list(range(1, n_max + 1)),
        q_values=[float(x) for x in q],
        q_first_half=[float(x) for x in q1],
        q_second_half=[float(x) for x in q2],
        n_star=int(neg[0]) + 1 if len(neg) else None,
        averaging_window=(float(w.times[0]), float(w.times[-1])),
        samples_used=len(w),
        split_half_discrepancy=disc,
        low_confidence=disc > split_tolerance,
        metric=metric,
    )


def empirical_dimension(report: TraceReport) -> Optional[int]:
    """Smallest N with q(N) < 0, or None when q stays nonnegative in range."""
    for n, q in zip(report.n_values, report.q_values):
        if q < 0:
            return n
    return None
