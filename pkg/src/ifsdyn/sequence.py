"""The state space M* of contraction sequences and its product metric.

A sequence is either eventually periodic (a finite preperiod followed by a
repeating period) or the block enumeration generator, which lists every word
of length 1, 2, 3, ... over an ordered symbol set in lexicographic order.
Symbols name maps of a :class:`~ifsdyn.metric.ContractionAlphabet`; alphabets
hold pairwise distinct maps, so symbol equality is map equality.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import AlphabetMismatch, EmptySystem, NotNormalizable, SpaceMismatch, ValidationError
from .metric import bounded_distance

DEFAULT_TOLERANCE = 2.0 ** -40
DEFAULT_HORIZON = 10_000


@dataclass(frozen=True)
class EventuallyPeriodic:
    preperiod: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise ValidationError("period must be nonempty")

    def __str__(self):
        pre = ",".join(self.preperiod)
        per = ",".join(self.period)
        return f"({pre + ',' if pre else ''}overline{{{per}}})"


@dataclass(frozen=True)
class BlockEnumeration:
    """All 1-blocks, then all 2-blocks, ... over ``symbol_order``; ``offset`` counts shifts."""

    symbol_order: tuple
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "symbol_order", tuple(self.symbol_order))
        if len(self.symbol_order) < 2 or len(set(self.symbol_order)) != len(self.symbol_order):
            raise ValidationError("block enumeration needs at least two distinct symbols")
        if self.offset < 0:
            raise ValidationError("offset must be nonnegative")

    def __str__(self):
        tail = f", offset={self.offset}" if self.offset else ""
        return f"blocks({','.join(self.symbol_order)}{tail})"


def block_symbol(order, k):
    """The ``k``-th (1-based) letter of the block enumeration over ``order``."""
    a = len(order)
    pos = k - 1
    length, count = 1, a
    while pos >= length * count:
        pos -= length * count
        length += 1
        count *= a
    word, letter = divmod(pos, length)
    # most significant digit first
    digit = (word // a ** (length - 1 - letter)) % a
    return order[digit]


@dataclass(frozen=True)
class IfsSequence:
    """An element of M* over a named alphabet."""

    alphabet: object
    rep: object

    def __post_init__(self):
        symbols = self.rep.symbol_order if self.is_generated else self.rep.preperiod + self.rep.period
        for s in symbols:
            if s not in self.alphabet:
                raise ValidationError(f"unknown symbol {s!r}", s)

    @classmethod
    def periodic(cls, alphabet, period, preperiod=()):
        return cls(alphabet, EventuallyPeriodic(tuple(preperiod), tuple(period)))

    @classmethod
    def blocks(cls, alphabet, symbol_order):
        return cls(alphabet, BlockEnumeration(tuple(symbol_order)))

    @property
    def is_generated(self):
        return isinstance(self.rep, BlockEnumeration)

    @property
    def space(self):
        return self.alphabet.space

    def symbols(self):
        """Finite set of symbols the stream can use, in first-appearance order."""
        if self.is_generated:
            return distinct_symbols(self)
        return tuple(dict.fromkeys(self.rep.preperiod + self.rep.period))

    def prefix(self, n):
        return [index(self, k) for k in range(1, n + 1)]

    def map_at(self, k):
        return self.alphabet[index(self, k)]

    def __str__(self):
        return str(self.rep)


def index(seq, k):
    """The ``k``-th symbol (1-based) of ``seq``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rep = seq.rep
    if isinstance(rep, BlockEnumeration):
        return block_symbol(rep.symbol_order, k + rep.offset)
    if k <= len(rep.preperiod):
        return rep.preperiod[k - 1]
    return rep.period[(k - 1 - len(rep.preperiod)) % len(rep.period)]


def primitive_root(word):
    """Shortest ``u`` with ``word == u * (len(word) // len(u))``."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def canonical_rep(rep):
    pre, period = list(rep.preperiod), primitive_root(tuple(rep.period))
    while pre and pre[-1] == period[-1]:
        pre.pop()
        period = period[-1:] + period[:-1]
    return EventuallyPeriodic(tuple(pre), period)


def normalize(seq, strict=False):
    """Canonical form: primitive period, preperiod tail absorbed into the period.

    Generated sequences have no finite canonical form; they are returned
    unchanged, or ``NotNormalizable`` is raised when ``strict`` is set.
    """
    if seq.is_generated:
        if strict:
            raise NotNormalizable("generated sequences have no finite canonical form")
        return seq
    return IfsSequence(seq.alphabet, canonical_rep(seq.rep))


class Equality(enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    UNKNOWN = "UnknownUpTo"


@dataclass(frozen=True)
class Comparison:
    verdict: Equality
    horizon: int | None = None
    first_difference: int | None = None

    def __bool__(self):
        return self.verdict is Equality.EQUAL

    def __str__(self):
        if self.verdict is Equality.UNKNOWN:
            return f"UnknownUpTo({self.horizon})"
        return self.verdict.value


def sequences_equal(f, g, horizon=DEFAULT_HORIZON):
    """Decide ``F == G`` exactly for eventually periodic pairs, else by prefix."""
    if f.alphabet != g.alphabet:
        raise AlphabetMismatch("sequences use different alphabets")
    if not f.is_generated and not g.is_generated:
        same = canonical_rep(f.rep) == canonical_rep(g.rep)
        return Comparison(Equality.EQUAL if same else Equality.NOT_EQUAL)
    if f.rep == g.rep:
        return Comparison(Equality.EQUAL)
    for k in range(1, horizon + 1):
        if index(f, k) != index(g, k):
            return Comparison(Equality.NOT_EQUAL, first_difference=k)
    return Comparison(Equality.UNKNOWN, horizon=horizon)


@dataclass(frozen=True)
class FiniteIfs:
    """The distinct maps of a sequence, in first-appearance order."""

    space: object
    names: tuple
    maps: tuple

    def __post_init__(self):
        if not self.maps:
            raise EmptySystem("an IFS needs at least one map")
        if len(set(self.maps)) != len(self.maps):
            raise ValidationError("maps of a finite IFS must be pairwise distinct")

    def __len__(self):
        return len(self.maps)

    @property
    def ratios(self):
        return [m.ratio for m in self.maps]

    def subset_of(self, other):
        return set(self.maps) <= set(other.maps)


def finite_ifs(alphabet, names):
    return FiniteIfs(alphabet.space, tuple(names), tuple(alphabet[n] for n in names))


def embed_finite(ifs):
    """The sequence ``(f_1, ..., f_n, f_1, f_1, ...)`` representing a finite IFS."""
    if isinstance(ifs, FiniteIfs):
        names = ifs.names
        alphabet = ifs_alphabet(ifs)
    else:
        alphabet, names = ifs
    names = tuple(names)
    if not names:
        raise EmptySystem("cannot embed an empty system")
    return normalize(IfsSequence(alphabet, EventuallyPeriodic(names, names[:1])))


def ifs_alphabet(ifs):
    from .metric import ContractionAlphabet

    return ContractionAlphabet(ifs.space, tuple(zip(ifs.names, ifs.maps)))


def distinct_symbols(seq):
    """Symbols of ``seq`` in order of first appearance in the stream."""
    rep = seq.rep
    if isinstance(rep, BlockEnumeration):
        order = rep.symbol_order
        first = []
        k = 1
        # every symbol appears within one pass of the 1-blocks, or within the
        # current block length window after any offset
        while len(first) < len(order):
            s = index(seq, k)
            if s not in first:
                first.append(s)
            k += 1
        return tuple(first)
    return tuple(dict.fromkeys(rep.preperiod + rep.period))


def distinct_system(seq):
    """The finite IFS of distinct maps of ``seq`` in first-appearance order."""
    return finite_ifs(seq.alphabet, distinct_symbols(seq))


@dataclass(frozen=True)
class DistanceReport:
    value: float
    truncation_depth: int
    tail_bound: float

    @property
    def upper(self):
        return self.value + self.tail_bound


def truncation_depth(tolerance):
    if not 0.0 < tolerance < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    return max(1, math.ceil(math.log2(1.0 / tolerance)))


def sequence_distance(f, g, tolerance=DEFAULT_TOLERANCE):
    """Truncated product distance ``sum_k dbar(f_k, g_k) / 2**k``.

    The first ``K = ceil(log2(1/tolerance))`` terms are summed; since every
    term is below ``2**-k`` the true distance lies in
    ``[value, value + 2**-K)``.
    """
    if f.space != g.space:
        raise SpaceMismatch("sequences live on different spaces")
    depth = truncation_depth(tolerance)
    terms = []
    for k in range(1, depth + 1):
        a, b = f.map_at(k), g.map_at(k)
        if a != b:
            terms.append(math.ldexp(bounded_distance(a, b), -k))
    return DistanceReport(math.fsum(terms), depth, math.ldexp(1.0, -depth))
