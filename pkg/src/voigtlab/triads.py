"""Exact Galerkin interaction coefficients of the convection term.

For real basis modes e_i, e_j, e_q on a torus domain the coefficient

    T[q, i, j] = ((e_i . grad) e_j, e_q)_{L^2}

is a product of a polarization factor and a triple trigonometric integral
that is nonzero only when +-k_i +- k_j +- k_q = 0.  The table keeps every
nonzero entry with all three modes inside the basis, which is exactly the
Galerkin truncation; contributions landing outside the basis never appear.
Because the table is closed under the swap (q, i, j) -> (j, i, q), the
identity T[q,i,j] = -T[j,i,q] (incompressibility of e_i) holds entrywise,
and sum_q B(u)_q u_q = 0 to roundoff.
"""
from __future__ import annotations

import dataclasses
import itertools

import numpy as np

from . import kernels
from .spectral_domain import SpectralDomain, wavevector_representatives

_SIGNS = np.array(list(itertools.product((1, -1), repeat=3)), dtype=np.int64)


@dataclasses.dataclass(frozen=True, eq=False)
class TriadTable:
    q: np.ndarray
    i: np.ndarray
    j: np.ndarray
    coef: np.ndarray
    mode_count: int

    def __len__(self):
        return len(self.coef)

    def apply(self, u):
        """Coefficients of Pi (u . grad) u."""
        return kernels.triad_apply(self.q, self.i, self.j, self.coef,
                                   np.ascontiguousarray(u, dtype=float), self.mode_count)

    def apply_batch(self, states):
        return kernels.triad_apply_batch(self.q, self.i, self.j, self.coef,
                                         np.ascontiguousarray(states, dtype=float),
                                         self.mode_count)

    def jacobian(self, u):
        """Matrix of v -> Pi((u . grad) v + (v . grad) u)."""
        return kernels.triad_jacobian(self.q, self.i, self.j, self.coef,
                                      np.ascontiguousarray(u, dtype=float), self.mode_count)


def _phase_table():
    """table[sigma, ph_i, ph_j, ph_q]: e^{i sigma.theta} weight of phi_i phi_j' phi_q.

    cos t = sum_sigma e^{i sigma t}/2, sin t = sum_sigma -i sigma e^{i sigma t}/2,
    and the j factor is differentiated (cos' = -sin, sin' = cos).
    """
    def plain(ph, sg):
        return 0.5 if ph == 0 else -0.5j * sg

    def deriv(ph, sg):
        return 0.5j * sg if ph == 0 else 0.5

    t = np.zeros((8, 2, 2, 2), dtype=complex)
    for n, (sa, sb, sq) in enumerate(_SIGNS):
        for pi, pj, pq in itertools.product(range(2), repeat=3):
            t[n, pi, pj, pq] = plain(pi, sa) * deriv(pj, sb) * plain(pq, sq)
    return t


_cache: dict = {}


def triad_table(domain: SpectralDomain) -> TriadTable:
    """Interaction table for a torus domain (memoized per side length and kmax)."""
    domain.require_torus()
    key = (domain.side_length, domain.kmax)
    if key not in _cache:
        _cache[key] = _build(domain)
    return _cache[key]


def _rep_of(k):
    for c in k:
        if c != 0:
            return k if c > 0 else tuple(-x for x in k)
    return None


def _build(domain: SpectralDomain) -> TriadTable:
    reps = wavevector_representatives(domain.kmax)
    index = {k: n for n, k in enumerate(reps)}
    R = np.array(reps, dtype=np.int64)
    # mode index of (rep, polarization, phase) is 4 rep + 2 pol + phase
    pol = np.asarray(domain.polarizations).reshape(len(reps), 2, 2, 3)[:, :, 0, :]

    ta, tb, tq = [], [], []
    for a, ka in enumerate(reps):
        for b, kb in enumerate(reps):
            seen = set()
            for cand in (tuple(x + y for x, y in zip(ka, kb)),
                         tuple(x - y for x, y in zip(ka, kb))):
                rq = _rep_of(cand)
                if rq is None or rq not in index or rq in seen:
                    continue
                seen.add(rq)
                ta.append(a)
                tb.append(b)
                tq.append(index[rq])
    ta, tb, tq = (np.array(x, dtype=np.int64) for x in (ta, tb, tq))
    if len(ta) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return TriadTable(empty, empty, empty, np.zeros(0), domain.mode_count)

    # sign patterns with sa ka + sb kb + sq kq = 0
    combo = (_SIGNS[None, :, 0, None] * R[ta][:, None, :]
             + _SIGNS[None, :, 1, None] * R[tb][:, None, :]
             + _SIGNS[None, :, 2, None] * R[tq][:, None, :])
    valid = np.all(combo == 0, axis=2).astype(float)
    phase = np.einsum("ts,sijq->tijq", valid, _phase_table())
    assert np.max(np.abs(phase.imag), initial=0.0) < 1e-14
    phase = phase.real

    kappa = domain.wavenumber_scale
    c = domain.normalization
    scale = c**3 * domain.volume * kappa
    adv = np.einsum("tpx,tx->tp", pol[ta], R[tb].astype(float))       # a_i . k_j
    proj = np.einsum("tpx,trx->tpr", pol[tb], pol[tq])                 # a_j . a_q
    # axes: t, pol_i, ph_i, pol_j, ph_j, pol_q, ph_q
    block = (scale * adv[:, :, None, None, None, None, None]
             * proj[:, None, None, :, None, :, None]
             * phase[:, None, :, None, :, None, :])

    idx = np.arange(2)
    mi = 4 * ta[:, None, None] + 2 * idx[None, :, None] + idx[None, None, :]
    mj = 4 * tb[:, None, None] + 2 * idx[None, :, None] + idx[None, None, :]
    mq = 4 * tq[:, None, None] + 2 * idx[None, :, None] + idx[None, None, :]
    shape = block.shape
    I = np.broadcast_to(mi[:, :, :, None, None, None, None], shape)
    J = np.broadcast_to(mj[:, None, None, :, :, None, None], shape)
    Q = np.broadcast_to(mq[:, None, None, None, None, :, :], shape)

    keep = np.abs(block) > 1e-13 * np.max(np.abs(block))
    coef = block[keep]
    q, i, j = Q[keep], I[keep], J[keep]
    order = np.lexsort((j, i, q))
    return TriadTable(q=np.ascontiguousarray(q[order]), i=np.ascontiguousarray(i[order]),
                      j=np.ascontiguousarray(j[order]), coef=np.ascontiguousarray(coef[order]),
                      mode_count=domain.mode_count)
