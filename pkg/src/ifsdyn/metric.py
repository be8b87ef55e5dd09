"""Compact box spaces, certified affine contractions and the metrics on Con(X).

Every map is an affine contraction ``f(x) = A x + b`` of an axis-aligned box
``X = [l_1, u_1] x ... x [l_N, u_N]`` (N <= 3) with the Euclidean metric.
Because ``x -> |(A_f - A_g) x + (b_f - b_g)|`` is convex, the uniform distance
between two such maps is attained at a vertex of the box and is computed
exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    EscapesSpace,
    NotContractive,
    PointOutsideSpace,
    SpaceMismatch,
    ValidationError,
)

# Relative slack used when re-certifying maps whose coefficients went through
# floating-point scaling; never used for user-supplied maps.
SIMILARITY_TOL = 1e-12


@dataclass(frozen=True)
class SpaceBox:
    """The compact space ``X = C^N`` as an axis-aligned box."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper):
            raise ValidationError("lower and upper bounds differ in length", "space")
        if not 1 <= len(lower) <= 3:
            raise ValidationError(f"dimension {len(lower)} not in 1..3", "space")
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValidationError(f"axis {i}: need finite lower < upper", "space")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unit(cls, dim):
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self):
        return len(self.lower)

    @property
    def widths(self):
        return np.subtract(self.upper, self.lower)

    @property
    def diagonal(self):
        return float(np.linalg.norm(self.widths))

    def vertices(self):
        """All ``2**dim`` corners, shape ``(2**dim, dim)``."""
        return np.array(list(itertools.product(*zip(self.lower, self.upper))), dtype=float)

    def contains(self, point):
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.lower) and np.all(p <= self.upper))

    def contains_origin(self):
        return self.contains(np.zeros(self.dim))


def _lambda_max_sym(m):
    """Largest eigenvalue of a symmetric 1x1, 2x2 or 3x3 matrix, in closed form."""
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    if n == 2:
        p, q, r = m[0, 0], m[0, 1], m[1, 1]
        return float((p + r) / 2 + math.hypot((p - r) / 2, q))
    off = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
    if off == 0.0:
        return float(max(m[0, 0], m[1, 1], m[2, 2]))
    q = np.trace(m) / 3
    p = math.sqrt(((m[0, 0] - q) ** 2 + (m[1, 1] - q) ** 2 + (m[2, 2] - q) ** 2 + 2 * off) / 6)
    b = (m - q * np.eye(3)) / p
    r = min(1.0, max(-1.0, np.linalg.det(b) / 2))
    return float(q + 2 * p * math.cos(math.acos(r) / 3))


def spectral_norm(matrix):
    """Operator 2-norm of a small square matrix via the eigenvalues of ``A^T A``."""
    a = np.asarray(matrix, dtype=float)
    if a.shape == (1, 1):
        return abs(float(a[0, 0]))
    return math.sqrt(max(0.0, _lambda_max_sym(a.T @ a)))


def _is_similarity(a, ratio):
    gram = a.T @ a
    scale = max(ratio * ratio, 1.0)
    return bool(np.max(np.abs(gram - ratio * ratio * np.eye(a.shape[0]))) <= SIMILARITY_TOL * scale)


@dataclass(frozen=True)
class AffineContraction:
    """A certified contraction ``x -> A x + b`` mapping ``space`` into itself.

    Equality and hashing use the coefficients and the space only, so two maps
    are the same element of Con(X) exactly when their coefficients agree.
    """

    matrix: tuple
    offset: tuple
    space: SpaceBox
    ratio: float = field(compare=False)
    is_similarity: bool = field(compare=False)

    @property
    def A(self):
        return np.array(self.matrix, dtype=float)

    @property
    def b(self):
        return np.array(self.offset, dtype=float)

    @property
    def dim(self):
        return len(self.offset)

    def __call__(self, points):
        """Vectorised evaluation on an ``(..., dim)`` array, without range checks."""
        return np.asarray(points, dtype=float) @ self.A.T + self.b

    def scaled(self, factor):
        """``factor * f`` re-certified on the same space."""
        a = [[factor * v for v in row] for row in self.matrix]
        b = [factor * v for v in self.offset]
        return validate_contraction(self.space, a, b, slack=SIMILARITY_TOL)

    def __repr__(self):
        return f"AffineContraction(A={list(map(list, self.matrix))}, b={list(self.offset)}, ratio={self.ratio:.6g})"


def validate_contraction(space, matrix, offset, slack=0.0):
    """Certify ``x -> A x + b`` as a contraction of ``space`` into itself.

    Raises ``NotContractive`` when the spectral norm is at least 1 and
    ``EscapesSpace`` (naming the first offending vertex) when some vertex
    image leaves the box. ``slack`` widens the box relative to its widths and
    is only meant for re-certifying maps after floating-point rescaling.
    """
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    b = np.atleast_1d(np.asarray(offset, dtype=float))
    n = space.dim
    if a.shape != (n, n) or b.shape != (n,):
        raise ValidationError(f"expected {n}x{n} matrix and length-{n} offset, got {a.shape} and {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("non-finite coefficient")
    ratio = spectral_norm(a)
    if ratio >= 1.0:
        raise NotContractive(f"spectral norm {ratio:.12g} >= 1")
    pad = slack * space.widths
    lo = np.asarray(space.lower) - pad
    hi = np.asarray(space.upper) + pad
    for v in space.vertices():
        img = a @ v + b
        if np.any(img < lo) or np.any(img > hi):
            raise EscapesSpace(
                f"vertex {v.tolist()} maps to {img.tolist()} outside the space",
                vertex=tuple(v.tolist()),
                image=tuple(img.tolist()),
            )
    return AffineContraction(
        matrix=tuple(tuple(float(x) for x in row) for row in a),
        offset=tuple(float(x) for x in b),
        space=space,
        ratio=ratio,
        is_similarity=_is_similarity(a, ratio),
    )


def apply(f, point):
    """Evaluate ``f`` at a single point of its space."""
    p = np.atleast_1d(np.asarray(point, dtype=float))
    if p.shape != (f.dim,) or not f.space.contains(p):
        raise PointOutsideSpace(f"point {p.tolist()} is not in the space")
    return f.A @ p + f.b


def _check_same_space(f, g):
    if f.space != g.space:
        raise SpaceMismatch("maps are certified on different spaces")


def sup_distance(f, g, space=None):
    """Uniform distance ``sup_x |f(x) - g(x)|``, exact via the box vertices."""
    _check_same_space(f, g)
    if space is not None and space != f.space:
        raise SpaceMismatch("maps are not certified on the given space")
    if f == g:
        return 0.0
    da = np.subtract(f.matrix, g.matrix)
    db = np.subtract(f.offset, g.offset)
    diffs = f.space.vertices() @ da.T + db
    return float(np.max(np.sqrt(np.sum(diffs * diffs, axis=1))))


@lru_cache(maxsize=65536)
def _bounded_cached(f, g):
    d = sup_distance(f, g)
    return d / (1.0 + d)


def bounded_distance(f, g, space=None):
    """``d / (1 + d)`` for the uniform distance ``d``; always in ``[0, 1)``.

    Values are memoised per map pair, which is safe because maps are
    immutable and hash on their coefficients.
    """
    _check_same_space(f, g)
    if space is not None and space != f.space:
        raise SpaceMismatch("maps are not certified on the given space")
    return _bounded_cached(f, g)


@dataclass(frozen=True)
class ContractionAlphabet:
    """Named, pairwise distinct contractions of one space."""

    space: SpaceBox
    entries: tuple  # of (name, AffineContraction)

    def __post_init__(self):
        entries = tuple((str(n), m) for n, m in self.entries)
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise ValidationError("alphabet names must be unique", "alphabet")
        seen = {}
        for name, m in entries:
            if m.space != self.space:
                raise SpaceMismatch(f"map {name!r} is certified on a different space")
            if m in seen:
                raise ValidationError(f"maps {seen[m]!r} and {name!r} have identical coefficients", name)
            seen[m] = name
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_lookup", dict(entries))

    @classmethod
    def build(cls, space, maps):
        """Validate ``{name: (matrix, offset)}`` into an alphabet."""
        entries = []
        for name, (a, b) in maps.items():
            try:
                entries.append((name, validate_contraction(space, a, b)))
            except (NotContractive, EscapesSpace) as exc:
                raise ValidationError(f"map {name!r}: {exc}", name, exc.code) from exc
        return cls(space, tuple(entries))

    @property
    def names(self):
        return tuple(n for n, _ in self.entries)

    def __getitem__(self, name):
        try:
            return self._lookup[name]
        except KeyError:
            raise ValidationError(f"unknown symbol {name!r}", name) from None

    def __contains__(self, name):
        return name in self._lookup

    def __len__(self):
        return len(self.entries)

    def map_all(self, fn):
        """New alphabet with ``fn`` applied to every map, names kept."""
        return ContractionAlphabet(self.space, tuple((n, fn(m)) for n, m in self.entries))
