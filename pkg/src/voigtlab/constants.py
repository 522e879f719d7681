"""Dimensionless constants of the spectral inequalities.

Every entry is a closed-form expression, evaluated once in double precision.
Two of them are built from printed truncations ("1.456..." in the
Lieb-Thirring constant and "0.116..." for Lieb's CLR bound); these are used
exactly as printed so that the reported values reproduce digit for digit.
"""
from __future__ import annotations

import contextlib
import dataclasses
import math

from .errors import InvalidArgument

#: Excess factor over the semiclassical Lieb-Thirring constant, as printed.
LT_EXCESS = 1.456
#: Lieb's factor over the semiclassical CLR constant in 3D.
LIEB_CLR_FACTOR = 6.8693
#: Printed truncation of LIEB_CLR_FACTOR / (6 pi^2) = 0.116000934...
L03_PRINTED = 0.116

CLR_MODES = ("frank_pointwise", "uniform", "best")

_fault_scale = None


@dataclasses.dataclass(frozen=True)
class ConstantSet:
    c_sob6: float
    c_sob3: float
    c_bly: float
    c_lt: float
    c_1_clr: float
    c_s_clr_uniform: float
    l_0_3: float

    def as_dict(self):
        return dataclasses.asdict(self)


def _sob6():
    return (2.0 / math.pi) ** (2.0 / 3.0) / math.sqrt(3.0)


def _bly():
    return 0.4 * (3.0 * math.pi**2) ** (2.0 / 3.0)


def _lt():
    return (5.0 / 6.0) * 2.0 ** (1.0 / 3.0) / math.pi ** (4.0 / 3.0) * LT_EXCESS ** (2.0 / 3.0)


def _c1_clr(l03):
    return 3.0 * (3.0 * l03) ** (2.0 / 3.0)


def _uniform_clr():
    return 2.25 * 6.0 ** (1.0 / 3.0) / math.pi ** (2.0 / 3.0)


def constant_set() -> ConstantSet:
    """Return the full table of constants.

    ``c_sob3`` is taken at its interpolation bound ``sqrt(c_sob6)``.
    """
    c6 = _sob6()
    cs = ConstantSet(
        c_sob6=c6,
        c_sob3=math.sqrt(c6),
        c_bly=_bly(),
        c_lt=_lt(),
        c_1_clr=_c1_clr(L03_PRINTED),
        c_s_clr_uniform=_uniform_clr(),
        l_0_3=L03_PRINTED,
    )
    if _fault_scale is not None:
        cs = ConstantSet(**{k: v * _fault_scale for k, v in cs.as_dict().items()})
    return cs


@contextlib.contextmanager
def injected_fault(scale=1.01):
    """Scale every constant by ``scale`` inside the block (negative-control runs)."""
    global _fault_scale
    prev, _fault_scale = _fault_scale, float(scale)
    try:
        yield
    finally:
        _fault_scale = prev


def frank_clr(s: float) -> float:
    """Fractional CLR constant at order ``s`` from Frank's bound on L_{0,3}(s).

    The bracket is evaluated as printed, with the dimension factor inside
    the power; that form attains its interval maximum at s = 1/2.
    """
    a = 3.0 - 2.0 * s
    inner = (9.0 * (3.0 + 2.0 * s) / a**2) ** (a / (2.0 * s))
    inner *= 1.0 / (6.0 * math.pi**2) * 3.0 / a
    return inner ** (2.0 * s / 3.0) * 3.0 / a


def c_s_clr(s: float, mode: str = "uniform") -> float:
    """CLR constant for orbitals suborthonormal in the order-``s`` space.

    Parameters
    ----------
    s : float
        Order in [1/2, 1].
    mode : {'frank_pointwise', 'uniform', 'best'}
        ``best`` returns C_{1,CLR} at s = 1 (Lieb's constant, which is what the
        small-alpha estimate uses) and the pointwise value elsewhere.
    """
    if not 0.5 <= s <= 1.0:
        raise InvalidArgument(f"s must lie in [1/2, 1], got {s!r}")
    cs = constant_set()
    scale = 1.0 if _fault_scale is None else _fault_scale
    if mode == "frank_pointwise":
        return frank_clr(s) * scale
    if mode == "uniform":
        return cs.c_s_clr_uniform
    if mode == "best":
        if s == 1.0:
            return cs.c_1_clr
        return min(frank_clr(s) * scale, cs.c_s_clr_uniform)
    raise InvalidArgument(f"unknown CLR mode {mode!r}; expected one of {CLR_MODES}")


def format_table(cs: ConstantSet | None = None) -> str:
    cs = cs or constant_set()
    rows = cs.as_dict()
    width = max(len(k) for k in rows)
    return "\n".join(f"{k:<{width}}  {v:.15g}" for k, v in rows.items())
