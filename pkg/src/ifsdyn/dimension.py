"""Similarity dimension: the Moran equation and its evolution under scaling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidRatio

MORAN_TOL = 1e-12
MORAN_MAX_ITER = 200


class Method(enum.Enum):
    UNIFORM = "UniformFormula"
    MORAN = "MoranBisection"
    EVOLUTION = "EvolutionFormula"
    BOX_COUNTING = "BoxCounting"


@dataclass(frozen=True)
class DimensionReport:
    s: float
    method: Method
    residual: float = 0.0
    iterations: int = 0


def _check_ratio(r):
    try:
        r = float(r)
    except (TypeError, ValueError):
        raise InvalidRatio(f"ratio {r!r} is not a number") from None
    if not 0.0 < r < 1.0:
        raise InvalidRatio(f"ratio {r!r} is not in (0, 1)")
    return r


def moran_sum(ratios, s):
    return math.fsum(r ** s for r in ratios)


def moran_dimension(ratios):
    """Unique ``s >= 0`` with ``sum(r_i ** s) == 1``, by bisection.

    ``s -> sum(r_i ** s)`` is strictly decreasing and equals ``m >= 1`` at 0,
    so doubling the upper end until the sum drops below one brackets the root.
    """
    ratios = [_check_ratio(r) for r in ratios]
    if not ratios:
        raise InvalidRatio("need at least one ratio")
    if len(ratios) == 1:
        return DimensionReport(0.0, Method.MORAN, 0.0, 0)
    lo, hi = 0.0, 1.0
    while moran_sum(ratios, hi) >= 1.0:
        lo, hi = hi, 2 * hi
    it = 0
    mid = (lo + hi) / 2
    for it in range(1, MORAN_MAX_ITER + 1):
        mid = (lo + hi) / 2
        val = moran_sum(ratios, mid) - 1.0
        if val == 0.0 or mid in (lo, hi):
            break
        if val > 0:
            lo = mid
        else:
            hi = mid
    return DimensionReport(mid, Method.MORAN, abs(moran_sum(ratios, mid) - 1.0), it)


def uniform_dimension(m, r):
    """Closed form ``log m / -log r`` for ``m`` maps of ratio ``r``."""
    r = _check_ratio(r)
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    s = math.log(m) / -math.log(r)
    return DimensionReport(s, Method.UNIFORM, abs(m * r ** s - 1.0))


def evolved_dimension(s, r, phi_t_r):
    """Dimension after a parity-preserving evolution moves the common ratio ``r`` to ``phi_t_r``.

    ``s' = s / log_r(phi_t_r) = s * log r / log phi_t_r``.
    """
    r = _check_ratio(r)
    q = _check_ratio(phi_t_r)
    if s < 0:
        raise ValueError("s must be nonnegative")
    return DimensionReport(s * math.log(r) / math.log(q), Method.EVOLUTION)


def similarity_dimension(ifs):
    """Similarity dimension of a finite system of similarities."""
    if not all(m.is_similarity for m in ifs.maps):
        raise InvalidRatio("similarity dimension needs every map to be a similarity")
    ratios = ifs.ratios
    if len(set(ratios)) == 1 and 0 < ratios[0] < 1:
        return uniform_dimension(len(ratios), ratios[0])
    return moran_dimension(ratios)


def box_counting_dimension(raster):
    """Least-squares slope of ``log N(eps)`` against ``log(1/eps)``."""
    from .raster import box_counts

    bc = box_counts(raster)
    return DimensionReport(bc.slope, Method.BOX_COUNTING)
