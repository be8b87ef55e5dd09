"""Shift map, evolution operators and periodicity analysis on M*."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OriginNotInSpace, SpaceMismatch, TimeOutsideDomain
from .sequence import (
    BlockEnumeration,
    EventuallyPeriodic,
    IfsSequence,
    canonical_rep,
    distinct_system,
    index,
    normalize,
    sequence_distance,
    DEFAULT_TOLERANCE,
)
from .metric import bounded_distance


def _shift_rep(rep, n):
    if isinstance(rep, BlockEnumeration):
        return BlockEnumeration(rep.symbol_order, rep.offset + n)
    pre, period = rep.preperiod, rep.period
    if n <= len(pre):
        return EventuallyPeriodic(pre[n:], period)
    r = (n - len(pre)) % len(period)
    return EventuallyPeriodic((), period[r:] + period[:r])


def shift(seq, n=1):
    """The right shift ``(f_1, f_2, ...) -> (f_2, f_3, ...)`` applied ``n`` times.

    Eventually periodic inputs stay in canonical form; the period rotation is
    taken modulo the period length, so huge ``n`` costs nothing.
    """
    if n < 0:
        raise TimeOutsideDomain("shift count must be nonnegative")
    out = IfsSequence(seq.alphabet, _shift_rep(seq.rep, int(n)))
    return normalize(out)


class OperatorKind(enum.Enum):
    SHIFT = "shift"
    SCALE = "scale"


@dataclass(frozen=True)
class EvolutionOperator:
    """``phi(F, t)``: either ``shift^t`` (t in N) or ``exp(-t) F`` (t >= 0)."""

    kind: OperatorKind
    name: str = ""

    @classmethod
    def shift_discrete(cls, name="shift"):
        return cls(OperatorKind.SHIFT, name)

    @classmethod
    def scale_exp(cls, name="decay"):
        return cls(OperatorKind.SCALE, name)

    def check_time(self, t):
        if self.kind is OperatorKind.SHIFT:
            if isinstance(t, bool) or not float(t).is_integer() or t < 0:
                raise TimeOutsideDomain(f"shift operator needs a nonnegative integer time, got {t!r}")
            return int(t)
        t = float(t)
        if not math.isfinite(t) or t < 0:
            raise TimeOutsideDomain(f"scaling operator needs a finite time t >= 0, got {t!r}")
        return t

    def ratio_action(self, r, t):
        """Contraction ratio of the evolved copy of a map with ratio ``r``."""
        t = self.check_time(t)
        if self.kind is OperatorKind.SHIFT:
            return r
        return math.exp(-t) * r

    @property
    def preserves_parity(self):
        return self.kind is OperatorKind.SCALE


def evolve(op, seq, t):
    """``phi(seq, t)`` for either operator kind."""
    t = op.check_time(t)
    if op.kind is OperatorKind.SHIFT:
        return shift(seq, t)
    if not seq.space.contains_origin():
        raise OriginNotInSpace("scaling needs the origin inside the space")
    if t == 0:
        return seq
    factor = math.exp(-t)
    return IfsSequence(seq.alphabet.map_all(lambda m: m.scaled(factor)), seq.rep)


def coefficient_gap(f, g):
    """Largest coefficient difference between two sequences of equal structure.

    Returns ``inf`` when the symbol streams themselves differ.
    """
    rf = canonical_rep(f.rep) if not f.is_generated else f.rep
    rg = canonical_rep(g.rep) if not g.is_generated else g.rep
    if rf != rg or f.alphabet.names != g.alphabet.names:
        return math.inf
    gap = 0.0
    for name in f.alphabet.names:
        a, b = f.alphabet[name], g.alphabet[name]
        gap = max(gap, float(np.max(np.abs(np.subtract(a.matrix, b.matrix)))))
        gap = max(gap, float(np.max(np.abs(np.subtract(a.offset, b.offset)))))
    return gap


@dataclass(frozen=True)
class GroupPropertyReport:
    identity_exact: bool
    composition_gap: float
    tolerance: float

    @property
    def passed(self):
        return self.identity_exact and self.composition_gap <= self.tolerance


def verify_group_property(op, seq, t1, t2, tol=1e-12):
    """Check ``phi(F, 0) == F`` and ``phi(F, t1 + t2) ~ phi(phi(F, t1), t2)``."""
    identity = evolve(op, seq, 0)
    identity_exact = coefficient_gap(identity, seq) == 0.0 and identity.alphabet == seq.alphabet
    direct = evolve(op, seq, op.check_time(t1) + op.check_time(t2))
    composed = evolve(op, evolve(op, seq, t1), t2)
    gap = coefficient_gap(direct, composed)
    if op.kind is OperatorKind.SHIFT:
        tol = 0.0
    return GroupPropertyReport(identity_exact, gap, tol)


class Periodicity(enum.Enum):
    FIXED = "Fixed"
    PERIODIC = "Periodic"
    EVENTUALLY_FIXED = "EventuallyFixed"
    EVENTUALLY_PERIODIC = "EventuallyPeriodic"
    APERIODIC_UP_TO = "AperiodicUpTo"


@dataclass(frozen=True)
class PeriodicityReport:
    classification: Periodicity
    preperiod: int = 0
    period: int = 0
    horizon: int = 0
    witness: tuple = field(default=(), compare=False)

    @property
    def is_periodic(self):
        return self.classification in (Periodicity.FIXED, Periodicity.PERIODIC)

    def __str__(self):
        c = self.classification
        if c is Periodicity.FIXED:
            return "Fixed"
        if c is Periodicity.PERIODIC:
            return f"Periodic({self.period})"
        if c is Periodicity.EVENTUALLY_FIXED:
            return f"EventuallyFixed({self.preperiod})"
        if c is Periodicity.EVENTUALLY_PERIODIC:
            return f"EventuallyPeriodic({self.preperiod},{self.period})"
        return f"AperiodicUpTo({self.horizon})"


def _smallest_window_period(codes, horizon):
    """Smallest ``p <= horizon`` with ``codes[i] == codes[i + p]`` across the window."""
    for p in range(1, horizon + 1):
        if np.array_equal(codes[:-p], codes[p:]):
            return p
    return None


def classify_periodicity(seq, horizon=10_000):
    """Classify ``seq`` under the shift map.

    Eventually periodic sequences are classified exactly from their canonical
    form. Generated streams are only semi-decidable: a period ``p`` is ruled
    out when the length ``3 * horizon`` prefix contradicts it, and the report
    says ``AperiodicUpTo(h)`` with ``h`` the largest bound so certified.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if seq.is_generated:
        names = {s: i for i, s in enumerate(seq.rep.symbol_order)}
        codes = np.array([names[index(seq, k)] for k in range(1, 3 * horizon + 1)], dtype=np.int8)
        p = _smallest_window_period(codes, horizon)
        certified = horizon if p is None else p - 1
        return PeriodicityReport(Periodicity.APERIODIC_UP_TO, horizon=certified, witness=(3 * horizon,))
    rep = canonical_rep(seq.rep)
    k, p = len(rep.preperiod), len(rep.period)
    witness = (k, k + p, str(shift(seq, k).rep))
    if k == 0:
        kind = Periodicity.FIXED if p == 1 else Periodicity.PERIODIC
    else:
        kind = Periodicity.EVENTUALLY_FIXED if p == 1 else Periodicity.EVENTUALLY_PERIODIC
    return PeriodicityReport(kind, preperiod=k, period=p, witness=witness)


def periodic_truncation(seq, n):
    """The purely periodic sequence repeating the first ``n`` symbols of ``seq``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return normalize(IfsSequence(seq.alphabet, EventuallyPeriodic((), tuple(seq.prefix(n)))))


def rotation_word(names):
    """Concatenation of all cyclic rotations of ``names`` (length ``n**2``)."""
    names = tuple(names)
    return sum((names[i:] + names[:i] for i in range(len(names))), ())


@dataclass(frozen=True)
class ShiftIdentityReport:
    shifted: float
    predicted: float
    doubled: float
    slack: float

    @property
    def identity_gap(self):
        return abs(self.shifted - self.predicted)

    @property
    def identity_holds(self):
        return self.identity_gap <= self.slack

    @property
    def expansion_bound_holds(self):
        return self.shifted <= self.doubled + self.slack

    @property
    def passed(self):
        return self.identity_holds and self.expansion_bound_holds


def shift_distance_identity(f, g, tol=1e-10, tolerance=DEFAULT_TOLERANCE):
    """Compare ``D(shift F, shift G)`` with ``2 D(F, G) - dbar(f_1, g_1)``.

    Both sides are truncated series, so the comparison allows two tail bounds
    on top of ``tol``; the expansion bound ``D(shift F, shift G) <= 2 D(F, G)``
    is checked with the same slack.
    """
    if f.space != g.space:
        raise SpaceMismatch("sequences live on different spaces")
    d = sequence_distance(f, g, tolerance)
    ds = sequence_distance(shift(f), shift(g), tolerance)
    head = bounded_distance(f.map_at(1), g.map_at(1))
    return ShiftIdentityReport(
        shifted=ds.value,
        predicted=2 * d.value - head,
        doubled=2 * d.value,
        slack=tol + 2 * d.tail_bound,
    )
