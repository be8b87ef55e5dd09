"""Random validated contractions and sequences for property checks."""

from __future__ import annotations

import math

import numpy as np

from .errors import IfsError
from .metric import ContractionAlphabet, SpaceBox, validate_contraction
from .sequence import EventuallyPeriodic, IfsSequence


def random_contraction(rng, space, max_ratio=0.9, similarity=False):
    """A contraction of ``space`` with spectral norm below ``max_ratio``.

    Row and column absolute sums of the linear part (in box-normalised
    coordinates) are kept below ``max_ratio``; the offset is then drawn so
    that every vertex image stays in the box.
    """
    n = space.dim
    c = rng.uniform(0.1, max_ratio)
    if similarity:
        q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        a = c * q / math.sqrt(n)
    else:
        a = rng.uniform(-1, 1, size=(n, n))
        norm = max(np.abs(a).sum(axis=0).max(), np.abs(a).sum(axis=1).max())
        a = a * (c / norm)
    w = space.widths
    lo = np.asarray(space.lower)
    # work in unit coordinates u = (x - lo) / w, then map back
    neg = np.minimum(a, 0).sum(axis=1)
    pos = np.maximum(a, 0).sum(axis=1)
    u_off = rng.uniform(-neg, 1 - pos)
    matrix = (w[:, None] * a) / w[None, :]
    offset = lo + w * u_off - matrix @ lo
    try:
        return validate_contraction(space, matrix, offset)
    except IfsError:
        # anisotropic boxes can push the conjugated norm past 1
        return random_contraction(rng, space, max_ratio, similarity)


def random_alphabet(rng, space=None, size=4, similarity=False):
    space = space or SpaceBox.unit(2)
    entries = []
    while len(entries) < size:
        m = random_contraction(rng, space, similarity=similarity)
        if all(m != e for _, e in entries):
            entries.append((f"f{len(entries) + 1}", m))
    return ContractionAlphabet(space, tuple(entries))


def random_sequence(rng, alphabet, max_pre=6, max_period=6):
    names = alphabet.names
    pre = tuple(rng.choice(names, size=rng.integers(0, max_pre + 1)).tolist())
    period = tuple(rng.choice(names, size=rng.integers(1, max_period + 1)).tolist())
    return IfsSequence(alphabet, EventuallyPeriodic(pre, period))


def agreeing_pair(rng, alphabet, n):
    """Two sequences sharing exactly their first ``n`` symbols."""
    names = list(alphabet.names)
    head = tuple(rng.choice(names, size=n).tolist())
    a, b = rng.choice(names, size=2, replace=False).tolist()
    ta = (a,) + tuple(rng.choice(names, size=rng.integers(0, 5)).tolist())
    tb = (b,) + tuple(rng.choice(names, size=rng.integers(0, 5)).tolist())
    pa = tuple(rng.choice(names, size=rng.integers(1, 4)).tolist())
    pb = tuple(rng.choice(names, size=rng.integers(1, 4)).tolist())
    return (
        IfsSequence(alphabet, EventuallyPeriodic(head + ta, pa)),
        IfsSequence(alphabet, EventuallyPeriodic(head + tb, pb)),
    )
