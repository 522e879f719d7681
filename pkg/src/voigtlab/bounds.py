"""Explicit upper bounds for the attractor dimension in terms of (s, G, G1).

G = |box|^(1/2) |h| / nu^2 is the Grashof number and G1 = alpha |box|^(-2/3).
Four closed forms are provided:

``est1``
    min-max estimate, valid for s in [1/2, 1], homogeneous of degree 6 in G;
``est2``
    CLR-type estimate for s in [3/4, 1], degree 3/2 in G;
``est_mid``
    CLR-type estimate for s in [1/2, 3/4], degree 6(1 - s) in G;
``est3``
    small-alpha estimate for s = 1, valid only under a smallness gate on
    G1^3 G^4.

Values are real numbers; take a ceiling for an integer dimension.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Optional

from .constants import ConstantSet, c_s_clr, constant_set
from .errors import InvalidArgument


@dataclasses.dataclass(frozen=True)
class DimensionlessPair:
    grashof: float
    g1: float

    def __post_init__(self):
        if not self.grashof >= 0:
            raise InvalidArgument(f"G must be nonnegative, got {self.grashof!r}")
        if not self.g1 > 0:
            raise InvalidArgument(f"G1 must be positive, got {self.g1!r}")


@dataclasses.dataclass(frozen=True)
class BoundReport:
    theorem_id: str
    value: float
    applicable: bool
    gate_detail: str
    constants_used: dict
    clr_mode: Optional[str] = None
    s: Optional[float] = None
    branches: tuple = ()

    def as_dict(self):
        out = {"theorem_id": self.theorem_id, "value": self.value,
               "applicable": self.applicable, "gate_detail": self.gate_detail}
        if self.clr_mode is not None:
            out["clr_mode"] = self.clr_mode
        if self.branches:
            out["branches"] = [b.as_dict() for b in self.branches]
        return out


def grashof_numbers(params, domain) -> DimensionlessPair:
    """(G, G1) of a parameter set on a domain."""
    if not params.nu > 0 or not params.alpha > 0:
        raise InvalidArgument("nu and alpha must be positive")
    vol = domain.volume
    return DimensionlessPair(grashof=math.sqrt(vol) * params.forcing_norm / params.nu**2,
                             g1=params.alpha * vol ** (-2.0 / 3.0))


def _check_s(s):
    if not 0.5 <= s <= 1.0:
        raise InvalidArgument(f"s must lie in [1/2, 1], got {s!r}")


def _x(c: ConstantSet, s, g1):
    """(1 + C_BLY^s G1^s) / G1^s, decreasing in G1."""
    return (1.0 + c.c_bly**s * g1**s) / g1**s


def bound_minmax_only(s: float, pair: DimensionlessPair) -> BoundReport:
    _check_s(s)
    c = constant_set()
    pre = 2.5 * c.c_sob6**3 * c.c_bly ** (-1.5 - s)
    value = pre**3 * _x(c, s, pair.g1) ** 3 * pair.grashof**6
    return BoundReport("est1", value, True, "always applicable for s in [1/2, 1]",
                       c.as_dict(), None, s)


def _est2(c, s, pair, cs):
    pre = (5.0 / 3.0) * math.sqrt(2.0 / 3.0) * cs * c.c_bly**-1.5
    return pre**1.5 * _x(c, s, pair.g1) ** 1.5 * pair.grashof**1.5


def _est_mid(c, s, pair, cs):
    pre = ((5.0 / 3.0) * (2.0 / 3.0) ** (2.0 * (1.0 - s)) * cs
           * c.c_bly ** (2.0 * s - 3.0) * c.c_sob6 ** (6.0 - 8.0 * s))
    return pre**1.5 * _x(c, s, pair.g1) ** 1.5 * pair.grashof ** (6.0 * (1.0 - s))


def bound_clr(s: float, pair: DimensionlessPair, clr_mode: str = "uniform") -> BoundReport:
    """CLR-type bound: est2 for s >= 3/4, est_mid for s <= 3/4.

    At s = 3/4 both are evaluated and stored in ``branches``; the headline
    value is the smaller one.
    """
    _check_s(s)
    c = constant_set()
    cs = c_s_clr(s, clr_mode)
    snap = c.as_dict()
    branches = []
    if s >= 0.75:
        branches.append(BoundReport("est2", _est2(c, s, pair, cs), True,
                                    "s in [3/4, 1]", snap, clr_mode, s))
    if s <= 0.75:
        branches.append(BoundReport("est_mid", _est_mid(c, s, pair, cs), True,
                                    "s in [1/2, 3/4]", snap, clr_mode, s))
    if len(branches) == 1:
        return branches[0]
    best = min(branches, key=lambda r: r.value)
    detail = "s = 3/4: " + ", ".join(f"{b.theorem_id} = {b.value!r}" for b in branches)
    return dataclasses.replace(best, gate_detail=detail, branches=tuple(branches))


def small_alpha_gate(pair: DimensionlessPair):
    """(lhs, rhs) of the gate G1^3 G^4 <= rhs."""
    c = constant_set()
    lhs = pair.g1**3 * pair.grashof**4
    rhs = (9.0 / 20.0) ** 2 * c.c_bly ** (-1.0 / 3.0) / c.c_lt / c.c_sob6**2 * c.c_1_clr ** (-4.0 / 3.0)
    return lhs, rhs


def bound_small_alpha(pair: DimensionlessPair) -> BoundReport:
    """Small-alpha bound at s = 1; ``applicable`` is the (non-strict) gate."""
    c = constant_set()
    cs = c_s_clr(1.0, "best")
    lhs, rhs = small_alpha_gate(pair)
    pre = (20.0 / 9.0) * c.c_bly**-2 * math.sqrt(c.c_lt) * c.c_sob6 * cs ** (2.0 / 3.0)
    value = pre ** (9.0 / 13.0) * pair.g1 ** (-6.0 / 13.0) * pair.grashof ** (18.0 / 13.0)
    ok = lhs <= rhs
    detail = f"G1^3 G^4 = {lhs!r} {'<=' if ok else '>'} {rhs!r}"
    return BoundReport("est3", value, ok, detail, c.as_dict(), "best", 1.0)


def all_bounds(s: float, pair: DimensionlessPair) -> list:
    reports = [bound_minmax_only(s, pair), bound_clr(s, pair)]
    if s == 1.0:
        reports.append(bound_small_alpha(pair))
    return reports


def best_bound(s: float, pair: DimensionlessPair) -> BoundReport:
    """Smallest applicable bound among est1, est2/est_mid and (s = 1) est3."""
    _check_s(s)
    candidates = [r for r in all_bounds(s, pair) if r.applicable]
    return min(candidates, key=lambda r: r.value)
