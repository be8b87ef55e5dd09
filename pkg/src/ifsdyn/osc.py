"""Open set condition checking for finite affine systems with a box as the open set."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import PrerequisiteFailed, SpaceMismatch
from .dynamics import shift
from .sequence import distinct_system

# Overlaps thinner than this fraction of the open set's extent count as touching.
TOUCH_TOL = 1e-12


class OscVerdict(enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class OscResult:
    verdict: OscVerdict
    open_set: object
    pair: tuple = ()
    witness: tuple | None = None
    reason: str = ""

    @property
    def satisfied(self):
        return self.verdict is OscVerdict.SATISFIED

    def __str__(self):
        if self.verdict is OscVerdict.VIOLATED:
            return f"Violated({','.join(map(str, self.pair))})"
        return self.verdict.value


def _is_diagonal(a):
    return np.count_nonzero(a - np.diag(np.diag(a))) == 0


def _axis_sets(m, lo, hi):
    """Per-axis image of the open box under a diagonal map: (a, b, is_point)."""
    out = []
    for i in range(m.dim):
        d, c = m.A[i, i], m.b[i]
        if d == 0.0:
            out.append((c, c, True))
        else:
            u, v = sorted((d * lo[i] + c, d * hi[i] + c))
            out.append((u, v, False))
    return out


def _diagonal_overlap(f, g, lo, hi, eps):
    """Witness point in ``f(V) & g(V)`` for diagonal maps, or ``None``."""
    witness = []
    for (a1, b1, p1), (a2, b2, p2), e in zip(_axis_sets(f, lo, hi), _axis_sets(g, lo, hi), eps):
        if p1 and p2:
            if a1 != a2:
                return None
            witness.append(a1)
        elif p1 or p2:
            pt, (a, b) = (a1, (a2, b2)) if p1 else (a2, (a1, b1))
            if not a + e < pt < b - e:
                return None
            witness.append(pt)
        else:
            lo_i, hi_i = max(a1, a2), min(b1, b2)
            if hi_i - lo_i <= e:
                return None
            witness.append((lo_i + hi_i) / 2)
    return tuple(float(v) for v in witness)


def _candidate_axes(f, g):
    axes = []
    cols = [f.A.T, g.A.T]  # rows are edge directions of each parallelotope
    if f.dim == 2:
        for edges in cols:
            axes.extend(np.array([-e[1], e[0]]) for e in edges)
    else:
        for edges in cols:
            axes.extend(np.cross(edges[i], edges[j]) for i, j in ((0, 1), (0, 2), (1, 2)))
        axes.extend(np.cross(e1, e2) for e1 in cols[0] for e2 in cols[1])
    return [a / np.linalg.norm(a) for a in axes if np.linalg.norm(a) > 1e-14]


def _sat_separated(f, g, box, scale):
    """True when some candidate axis weakly separates the two image parallelotopes."""
    verts = box.vertices()
    pf, pg = f(verts), g(verts)
    for axis in _candidate_axes(f, g):
        a, b = pf @ axis, pg @ axis
        if a.max() <= b.min() + TOUCH_TOL * scale or b.max() <= a.min() + TOUCH_TOL * scale:
            return True
    return False


def _lp_witness(f, g, lo, hi):
    """Point deepest inside both open images, found by a small linear program."""
    n = f.dim
    # variables: y1 (n), y2 (n), t ; maximise t
    c = np.zeros(2 * n + 1)
    c[-1] = -1.0
    a_eq = np.hstack([f.A, -g.A, np.zeros((n, 1))])
    b_eq = g.b - f.b
    rows, rhs = [], []
    for k in range(2 * n):
        i = k % n
        up = np.zeros(2 * n + 1)
        up[k], up[-1] = 1.0, 1.0
        rows.append(up)
        rhs.append(hi[i])
        down = np.zeros(2 * n + 1)
        down[k], down[-1] = -1.0, 1.0
        rows.append(down)
        rhs.append(-lo[i])
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * (2 * n + 1), method="highs")
    if not res.success:
        return None
    return tuple((f.A @ res.x[:n] + f.b).tolist())


def osc_check(ifs, open_set):
    """Check the open set condition for ``ifs`` with the open box ``open_set``.

    Containment is checked on vertex images of the closed box. Pairwise
    disjointness of the open images is decided by interval arithmetic when
    both matrices are diagonal and by a separating-axis test when both are
    invertible; any other pair makes the verdict ``Unknown``.
    """
    space = ifs.space
    if open_set.dim != space.dim or not (space.contains(open_set.lower) and space.contains(open_set.upper)):
        raise SpaceMismatch("open set must be a box inside the space")
    lo, hi = np.asarray(open_set.lower), np.asarray(open_set.upper)
    eps = TOUCH_TOL * open_set.widths
    scale = open_set.diagonal
    for i, m in enumerate(ifs.maps, start=1):
        img = m(open_set.vertices())
        bad = np.any((img < lo) | (img > hi), axis=1)
        if bad.any():
            return OscResult(OscVerdict.VIOLATED, open_set, (i,), tuple(img[bad][0].tolist()), "containment")
    unknown = None
    for (i, f), (j, g) in itertools.combinations(enumerate(ifs.maps, start=1), 2):
        if _is_diagonal(f.A) and _is_diagonal(g.A):
            w = _diagonal_overlap(f, g, lo, hi, eps)
            if w is not None:
                return OscResult(OscVerdict.VIOLATED, open_set, (i, j), w, "overlap")
        elif abs(np.linalg.det(f.A)) > 1e-14 and abs(np.linalg.det(g.A)) > 1e-14:
            if not _sat_separated(f, g, open_set, scale):
                return OscResult(OscVerdict.VIOLATED, open_set, (i, j), _lp_witness(f, g, lo, hi), "overlap")
        elif unknown is None:
            unknown = (i, j)
    if unknown is not None:
        return OscResult(OscVerdict.UNKNOWN, open_set, unknown, reason="singular non-diagonal pair")
    return OscResult(OscVerdict.SATISFIED, open_set)


@dataclass(frozen=True)
class OscShiftReport:
    steps: int
    before: OscResult
    after: OscResult
    subset: bool

    @property
    def passed(self):
        return self.after.satisfied and self.subset


def osc_preserved_under_shift(seq, open_set, n):
    """Check that the system of ``shift^n(seq)`` keeps the open set condition."""
    base = distinct_system(seq)
    before = osc_check(base, open_set)
    if not before.satisfied:
        raise PrerequisiteFailed(f"the unshifted system does not satisfy the condition: {before}")
    shifted = distinct_system(shift(seq, n))
    return OscShiftReport(n, before, osc_check(shifted, open_set), shifted.subset_of(base))
