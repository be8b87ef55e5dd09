"""Runnable checks of the invariants behind each analysis.

Each suite returns :class:`~ifsdyn.io.Case` rows plus plain series used by
the figure renderer. Random material comes from one
``numpy.random.default_rng(seed)`` stream per suite, so reports are
reproducible.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .dimension import evolved_dimension, moran_dimension, similarity_dimension, uniform_dimension
from .dynamics import (
    EvolutionOperator,
    Periodicity,
    classify_periodicity,
    evolve,
    periodic_truncation,
    rotation_word,
    shift,
    shift_distance_identity,
    verify_group_property,
)
from .errors import IfsError
from .io import Case
from .metric import ContractionAlphabet, SpaceBox, bounded_distance, sup_distance
from .osc import OscVerdict, osc_check, osc_preserved_under_shift
from .raster import attractor_chaos_game, attractor_deterministic, box_counts
from .sampling import agreeing_pair, random_alphabet, random_contraction, random_sequence
from .sequence import (
    EventuallyPeriodic,
    Equality,
    IfsSequence,
    distinct_system,
    embed_finite,
    finite_ifs,
    index,
    normalize,
    sequence_distance,
    sequences_equal,
)

SUITES = ("metrics", "shift", "periodic", "dimension", "osc")
TRIANGLE_TOL = 1e-12
SIERPINSKI_DIM = 1.584962500721156
SIERPINSKI_HALF_DIM = 0.792481250360578


def sierpinski_alphabet():
    X = SpaceBox.unit(2)
    half = [[0.5, 0.0], [0.0, 0.5]]
    return ContractionAlphabet.build(X, {"f1": (half, [0.0, 0.0]), "f2": (half, [0.5, 0.0]), "f3": (half, [0.25, 0.5])})


def _work_alphabet(scenario, rng, size=4):
    """The scenario alphabet when it has enough symbols, else a random one on its space."""
    if scenario is not None and len(scenario.alphabet) >= size:
        return scenario.alphabet
    space = scenario.space if scenario is not None else SpaceBox.unit(2)
    return random_alphabet(rng, space, size)


# ---------------------------------------------------------------- metrics


def suite_metrics(scenario=None, seed=42, triples=1000, seq_triples=200, tolerance=2.0 ** -40):
    rng = np.random.default_rng(seed)
    cases, data = [], {}
    neg = asym = ident = 0
    tri_sup = tri_bar = 0.0
    bar_max = 0.0
    for n in range(triples):
        X = SpaceBox.unit(1 + n % 3)
        f, g, h = (random_contraction(rng, X) for _ in range(3))
        for d in (sup_distance, bounded_distance):
            fg, gh, fh = d(f, g), d(g, h), d(f, h)
            neg += fg < 0
            asym += fg != d(g, f)
            ident += (d(f, f) != 0.0) + ((fg == 0.0) != (f == g))
            viol = fh - (fg + gh)
            if d is sup_distance:
                tri_sup = max(tri_sup, viol)
            else:
                tri_bar = max(tri_bar, viol)
                bar_max = max(bar_max, fg, gh, fh)
    cases += [
        Case("metrics.con.nonnegative", neg == 0, neg, 0, f"{triples} triples, both metrics"),
        Case("metrics.con.symmetry", asym == 0, asym, 0, "exact equality"),
        Case("metrics.con.identity", ident == 0, ident, 0, "zero iff coefficients agree"),
        Case("metrics.con.sup_triangle", tri_sup <= TRIANGLE_TOL, tri_sup, TRIANGLE_TOL, "max violation"),
        Case("metrics.con.bounded_triangle", tri_bar <= TRIANGLE_TOL, tri_bar, TRIANGLE_TOL, "max violation"),
        Case("metrics.con.bounded_below_one", bar_max < 1.0, bar_max, 1.0, "largest bounded distance"),
    ]

    # vertex supremum against a dense grid
    X = SpaceBox.unit(2)
    grid = np.stack(np.meshgrid(np.linspace(0, 1, 101), np.linspace(0, 1, 101)), -1).reshape(-1, 2)
    grid_gap = 0.0
    for _ in range(100):
        f, g = random_contraction(rng, X), random_contraction(rng, X)
        exact = sup_distance(f, g)
        sampled = float(np.max(np.linalg.norm(f(grid) - g(grid), axis=1)))
        lip = float(np.linalg.norm(f.A - g.A, 2))
        grid_gap = max(grid_gap, (exact - sampled) / (lip * 0.01 * math.sqrt(2) + 1e-300), (sampled - exact) * 1e12)
    cases.append(Case("metrics.con.vertex_supremum", grid_gap <= 1.0, grid_gap, 1.0,
                      "grid gap / (spacing * Lipschitz), 100 pairs"))

    sim_err = 0.0
    for n in range(100):
        X = SpaceBox.unit(1 + n % 3)
        f = random_contraction(rng, X, similarity=True)
        x, y = rng.uniform(0, 1, (2, 50, X.dim))
        measured = np.linalg.norm(f(x) - f(y), axis=1) / np.linalg.norm(x - y, axis=1)
        sim_err = max(sim_err, float(np.max(np.abs(measured - f.ratio))), float(not f.is_similarity))
    cases.append(Case("metrics.con.similarity_ratio", sim_err <= 1e-10, sim_err, 1e-10, "100 similarities x 50 pairs"))

    alphabet = _work_alphabet(scenario, rng)
    neg = asym = ident = 0
    tri = bound = 0.0
    tail = 0.0
    for _ in range(seq_triples):
        F, G, H = (random_sequence(rng, alphabet) for _ in range(3))
        fg, gf = sequence_distance(F, G, tolerance), sequence_distance(G, F, tolerance)
        gh, fh = sequence_distance(G, H, tolerance), sequence_distance(F, H, tolerance)
        tail = fg.tail_bound
        neg += fg.value < 0
        asym += abs(fg.value - gf.value) > 2 * tail
        equal = sequences_equal(F, G).verdict is Equality.EQUAL
        ident += (sequence_distance(F, F, tolerance).value != 0.0) + ((fg.value == 0.0) != equal)
        tri = max(tri, fh.value - (fg.value + gh.value) - 2 * tail)
        bound = max(bound, fg.upper, gh.upper, fh.upper)
    cases += [
        Case("metrics.seq.nonnegative", neg == 0, neg, 0, f"{seq_triples} triples"),
        Case("metrics.seq.symmetry", asym == 0, asym, 0, "within 2 tail bounds"),
        Case("metrics.seq.identity", ident == 0, ident, 0, "zero iff streams equal"),
        Case("metrics.seq.triangle", tri <= 0.0, tri, 0.0, "violation beyond 2 tail bounds"),
        Case("metrics.seq.below_one", bound < 1.0, bound, 1.0, "largest value + tail"),
    ]

    if scenario is not None:
        names = scenario.alphabet.names
        worst = 0.0
        for a, b, c in itertools.product(names, repeat=3):
            f, g, h = (scenario.alphabet[x] for x in (a, b, c))
            worst = max(worst, sup_distance(f, h) - sup_distance(f, g) - sup_distance(g, h))
        cases.append(Case("metrics.scenario.triangle", worst <= TRIANGLE_TOL, worst, TRIANGLE_TOL,
                          f"all {len(names) ** 3} symbol triples"))
    return cases, data


# ---------------------------------------------------------------- shift


def remark_witness(alphabet):
    """Sequences differing only at index 2: close in D without sharing two leading maps."""
    a, b, c = alphabet.names[:3]
    F = normalize(IfsSequence(alphabet, EventuallyPeriodic((a, b), (a,))))
    G = normalize(IfsSequence(alphabet, EventuallyPeriodic((a, c), (a,))))
    return F, G


def suite_shift(scenario=None, seed=42, tolerance=2.0 ** -40):
    rng = np.random.default_rng(seed + 1)
    cases, data = [], {}
    alphabet = _work_alphabet(scenario, rng)

    worst_ratio = 0.0
    per_n = {}
    for i in range(200):
        n = 1 + i % 20
        F, G = agreeing_pair(rng, alphabet, n)
        d = sequence_distance(F, G, tolerance)
        per_n[n] = max(per_n.get(n, 0.0), d.upper)
        worst_ratio = max(worst_ratio, d.upper * 2 ** n)
    data["agreement"] = sorted(per_n.items())
    cases.append(Case("shift.agreement_bound", worst_ratio < 1.0, worst_ratio, 1.0,
                      "max (value + tail) * 2^n over 200 pairs, n = 1..20"))

    F, G = remark_witness(alphabet)
    d = sequence_distance(F, G, tolerance)
    differs = [k for k in range(1, 50) if index(F, k) != index(G, k)] == [2]
    ok = d.upper < 0.25 and d.value > 0 and differs and sequences_equal(F, G).verdict is Equality.NOT_EQUAL
    cases.append(Case("shift.converse_fails", ok, d.value, 0.25, "differs only at index 2 yet D < 1/4"))

    gap = 0.0
    expansion = 0
    for _ in range(100):
        F, G = random_sequence(rng, alphabet), random_sequence(rng, alphabet)
        rep = shift_distance_identity(F, G, 1e-10, tolerance)
        gap = max(gap, rep.identity_gap - rep.slack)
        expansion += not rep.expansion_bound_holds
    cases.append(Case("shift.distance_identity", gap <= 0, gap, 0.0, "excess over 1e-10 + 2 tails, 100 pairs"))
    cases.append(Case("shift.expansion_bound", expansion == 0, expansion, 0, "D(sF, sG) <= 2 D(F, G)"))

    seqs = [random_sequence(rng, alphabet) for _ in range(20)]
    if scenario is not None:
        seqs += list(scenario.sequences.values())
    names = alphabet.names
    seqs.append(IfsSequence.blocks(alphabet, names[:2]))
    bad = 0
    for F in seqs:
        S = shift(F)
        bad += any(index(S, k) != index(F, k + 1) for k in range(1, 1001))
    cases.append(Case("shift.stream_identity", bad == 0, bad, 0, f"{len(seqs)} sequences x 1000 terms"))

    bad = 0
    for F in seqs[:10]:
        cur = F
        for n in range(51):
            bad += evolve(EvolutionOperator.shift_discrete(), F, n) != normalize(cur)
            cur = shift(cur)
    cases.append(Case("shift.power_composition", bad == 0, bad, 0, "phi(F, n) = shift^n(F), n = 0..50"))

    op_shift, op_scale = EvolutionOperator.shift_discrete(), EvolutionOperator.scale_exp()
    fails = 0
    for _ in range(50):
        F = random_sequence(rng, alphabet)
        n1, n2 = (int(v) for v in rng.integers(0, 40, 2))
        fails += not verify_group_property(op_shift, F, n1, n2).passed
    cases.append(Case("shift.group_property.shift", fails == 0, fails, 0, "exact, 50 draws"))
    if alphabet.space.contains_origin():
        worst = 0.0
        fails = 0
        for _ in range(50):
            F = random_sequence(rng, alphabet)
            t1, t2 = rng.uniform(0, 3, 2)
            rep = verify_group_property(op_scale, F, t1, t2, 1e-12)
            worst = max(worst, rep.composition_gap)
            fails += not rep.passed
        cases.append(Case("shift.group_property.scale", fails == 0, worst, 1e-12, "coefficient gap, 50 draws"))

        fails = 0
        ratio_err = 0.0
        for _ in range(20):
            F = random_sequence(rng, alphabet)
            t = float(rng.uniform(0, 2))
            E = evolve(op_scale, F, t)
            fails += str(classify_periodicity(E, 100)) != str(classify_periodicity(F, 100))
            for name in alphabet.names:
                ratio_err = max(ratio_err, abs(E.alphabet[name].ratio - math.exp(-t) * alphabet[name].ratio))
        cases.append(Case("shift.scale_keeps_structure", fails == 0, fails, 0, "classification unchanged"))
        cases.append(Case("shift.scale_ratio_action", ratio_err <= 1e-12, ratio_err, 1e-12, "ratio(e^-t f) = e^-t ratio(f)"))
    return cases, data


# ---------------------------------------------------------------- periodic


def suite_periodic(scenario=None, seed=42, tolerance=2.0 ** -40, horizon=1000):
    rng = np.random.default_rng(seed + 2)
    cases, data = [], {}
    alphabet = _work_alphabet(scenario, rng)
    f1, f2, f3, f4 = alphabet.names[:4]

    families = [
        ("fixed", IfsSequence.periodic(alphabet, (f1,)), "Fixed"),
        ("periodic", IfsSequence.periodic(alphabet, (f1, f2, f3)), "Periodic(3)"),
        ("eventually_fixed", embed_finite((alphabet, (f1, f2, f3))), "EventuallyFixed(3)"),
        ("eventually_periodic", IfsSequence.periodic(alphabet, (f1, f2, f3), preperiod=(f4, f2)), "EventuallyPeriodic(2,3)"),
    ]
    for name, F, expected in families:
        got = classify_periodicity(F, horizon)
        cases.append(Case(f"periodic.family.{name}", str(got) == expected, str(got), expected, str(normalize(F))))
    pre_m = 2
    F = families[3][1]
    ok = shift(F, pre_m) == shift(F, pre_m + 3)
    cases.append(Case("periodic.family.eventually_periodic_return", ok, int(ok), 1, "shift^m F = shift^(m+n) F"))

    blocks = IfsSequence.blocks(alphabet, (f1, f2))
    cycle = IfsSequence.periodic(alphabet, (f1, f2))
    rb, rc = classify_periodicity(blocks, horizon), classify_periodicity(cycle, horizon)
    same_sys = distinct_system(blocks) == distinct_system(cycle)
    ok = rb.classification is Periodicity.APERIODIC_UP_TO and rb.horizon == horizon and str(rc) == "Periodic(2)" and same_sys
    cases.append(Case("periodic.coexistence", ok, str(rb), f"AperiodicUpTo({horizon})", "same distinct system as Periodic(2)"))

    for n in (2, 3, 4):
        names = alphabet.names[:n]
        F = IfsSequence.periodic(alphabet, rotation_word(names))
        ok = shift(F, n * n) == normalize(F)
        cases.append(Case(f"periodic.rotations.n{n}", ok, str(classify_periodicity(F, horizon)), f"divides {n * n}",
                          "shift^(n^2) F = F"))

    bad = 0
    seqs = [random_sequence(rng, alphabet) for _ in range(100)]
    if scenario is not None:
        seqs += [s for s in scenario.sequences.values() if not s.is_generated]
    for F in seqs:
        rep = classify_periodicity(F, horizon)
        if rep.is_periodic:
            bad += len(distinct_system(F)) > rep.period or shift(F, rep.period) != normalize(F)
    cases.append(Case("periodic.finite_system", bad == 0, bad, 0, "periodic points have <= p distinct maps"))

    worst = 0.0
    curve = {}
    pool = [random_sequence(rng, alphabet, 12, 12) for _ in range(49)] + [blocks]
    for F in pool:
        for n in range(1, 13):
            d = sequence_distance(F, periodic_truncation(F, n), tolerance)
            worst = max(worst, d.upper * 2 ** n)
            curve[n] = max(curve.get(n, 0.0), d.upper)
    data["density"] = sorted(curve.items())
    cases.append(Case("periodic.density", worst < 1.0, worst, 1.0, "max D(F, G_n) * 2^n, 50 F, n = 1..12"))

    bad = 0
    for F in seqs:
        N = normalize(F)
        bad += normalize(N) != N or N.prefix(1000) != F.prefix(1000)
    cases.append(Case("periodic.normalize", bad == 0, bad, 0, "idempotent and stream preserving"))

    bad = 0
    for _ in range(50):
        k = int(rng.integers(1, len(alphabet) + 1))
        names = tuple(rng.choice(alphabet.names, size=k, replace=False).tolist())
        bad += distinct_system(embed_finite((alphabet, names))).names != names
    cases.append(Case("periodic.embedding_roundtrip", bad == 0, bad, 0, "distinct system of the embedding"))
    return cases, data


# ---------------------------------------------------------------- dimension


def _uniform_similarity(ifs):
    r = ifs.ratios
    return all(m.is_similarity for m in ifs.maps) and len(set(r)) == 1 and 0 < r[0] < 1


def suite_dimension(scenario=None, seed=42, resolution=512, chaos_points=1_000_000):
    rng = np.random.default_rng(seed + 3)
    cases, data = [], {}
    u = uniform_dimension(3, 0.5).s
    cases.append(Case("dimension.uniform_sierpinski", abs(u - SIERPINSKI_DIM) <= 1e-12, u, SIERPINSKI_DIM, "tol 1e-12"))
    t = math.log(2)
    e = evolved_dimension(u, 0.5, math.exp(-t) * 0.5).s
    m = moran_dimension([math.exp(-t) * 0.5] * 3).s
    ok = abs(e - SIERPINSKI_HALF_DIM) <= 1e-10 and abs(e - m) <= 1e-10
    cases.append(Case("dimension.evolved_half", ok, e, SIERPINSKI_HALF_DIM, f"re-solved {m:.15g}"))

    worst = 0.0
    for _ in range(100):
        mm = int(rng.integers(1, 9))
        r = float(rng.uniform(0.05, 0.95))
        tt = float(rng.uniform(0, 2))
        s = uniform_dimension(mm, r).s
        q = math.exp(-tt) * r
        worst = max(worst, abs(evolved_dimension(s, r, q).s - uniform_dimension(mm, q).s),
                    abs(evolved_dimension(s, r, q).s - moran_dimension([q] * mm).s))
    cases.append(Case("dimension.two_path", worst <= 1e-10, worst, 1e-10, "formula vs closed form vs bisection, 100 draws"))

    resid = 0.0
    mono = 0
    for _ in range(100):
        ratios = rng.uniform(0.05, 0.95, int(rng.integers(2, 7))).tolist()
        rep = moran_dimension(ratios)
        resid = max(resid, rep.residual)
        smaller = list(ratios)
        smaller[int(rng.integers(len(ratios)))] *= 0.9
        mono += not moran_dimension(smaller).s < rep.s
    cases.append(Case("dimension.moran_residual", resid <= 1e-12, resid, 1e-12, "100 ratio lists"))
    cases.append(Case("dimension.moran_monotone", mono == 0, mono, 0, "shrinking a ratio lowers s"))

    systems = []
    if scenario is not None:
        for name, F in sorted(scenario.sequences.items()):
            ifs = distinct_system(F)
            if len(ifs) >= 2 and _uniform_similarity(ifs):
                systems.append((name, ifs))
    else:
        systems.append(("sierpinski", finite_ifs(sierpinski_alphabet(), ("f1", "f2", "f3"))))

    curve = []
    for name, ifs in systems:
        if not ifs.space.contains_origin():
            continue
        s = similarity_dimension(ifs).s
        r = ifs.ratios[0]
        worst = 0.0
        F = embed_finite(ifs)
        for tt in np.linspace(0, 2, 21):
            E = distinct_system(evolve(EvolutionOperator.scale_exp(), F, float(tt)))
            formula = evolved_dimension(s, r, math.exp(-tt) * r).s
            resolved = moran_dimension(E.ratios).s
            worst = max(worst, abs(formula - resolved))
            if name == systems[0][0]:
                curve.append((float(tt), formula, resolved))
        cases.append(Case(f"dimension.scenario.{name}", worst <= 1e-10, worst, 1e-10, "scaled system re-solved, t in [0,2]"))
    data["evolution"] = curve

    # rendering checks on the largest uniform system satisfying the open set condition
    for name, ifs in sorted(systems, key=lambda p: (-len(p[1]), p[0])):
        if not osc_check(ifs, ifs.space).satisfied:
            continue
        det = attractor_deterministic(ifs, resolution)
        chaos = attractor_chaos_game(ifs, resolution, chaos_points, seed)
        chaos2 = attractor_chaos_game(ifs, resolution, chaos_points, seed, workers=4)
        outside = int(np.sum(chaos.bits & ~det.dilated().bits))
        cases.append(Case(f"dimension.raster.{name}.containment", outside == 0, outside, 0,
                          "chaos cells outside dilated deterministic raster"))
        cases.append(Case(f"dimension.raster.{name}.determinism", chaos == chaos2, int(chaos == chaos2), 1,
                          "1 vs 4 workers bit-identical"))
        s = similarity_dimension(ifs).s
        bc = box_counts(det)
        cases.append(Case(f"dimension.raster.{name}.box_counting", abs(bc.slope - s) <= 0.08, bc.slope, s, "within 0.08"))
        data["raster"] = det
        data["box_counts"] = bc
        data["similarity_dimension"] = s
        break
    return cases, data


# ---------------------------------------------------------------- osc


def overlap_pair():
    X = SpaceBox.unit(1)
    return finite_ifs(ContractionAlphabet.build(X, {"o1": ([[0.6]], [0.0]), "o2": ([[0.6]], [0.4])}), ("o1", "o2"))


def witness_inside(ifs, result):
    """True when the reported witness lies in the open images of the offending pair."""
    if result.witness is None or len(result.pair) != 2:
        return False
    lo, hi = np.asarray(result.open_set.lower), np.asarray(result.open_set.upper)
    w = np.asarray(result.witness)
    for i in result.pair:
        m = ifs.maps[i - 1]
        y = np.linalg.solve(m.A, w - m.b)
        if not (np.all(y > lo) and np.all(y < hi)):
            return False
    return True


def suite_osc(scenario=None, seed=42):
    rng = np.random.default_rng(seed + 4)
    cases, data = [], {}
    sier = finite_ifs(sierpinski_alphabet(), ("f1", "f2", "f3"))
    res = osc_check(sier, sier.space)
    cases.append(Case("osc.sierpinski", res.satisfied, str(res), "Satisfied", "V = open unit square"))
    ov = overlap_pair()
    res = osc_check(ov, ov.space)
    ok = res.verdict is OscVerdict.VIOLATED and res.pair == (1, 2) and witness_inside(ov, res)
    cases.append(Case("osc.overlap", ok, str(res), "Violated(1,2)", f"witness {res.witness}"))

    targets = [("sierpinski", embed_finite(sier))]
    if scenario is not None:
        targets += sorted(scenario.sequences.items())
    for name, F in targets:
        ifs = distinct_system(F)
        try:
            res = osc_check(ifs, ifs.space)
        except IfsError as exc:
            cases.append(Case(f"osc.scenario.{name}", False, exc.code, "", str(exc)))
            continue
        if res.verdict is OscVerdict.VIOLATED:
            ok = res.reason == "containment" or witness_inside(ifs, res)
            cases.append(Case(f"osc.scenario.{name}.witness", ok, str(res), "witness in both images", str(res.witness)))
            continue
        if res.verdict is OscVerdict.UNKNOWN:
            cases.append(Case(f"osc.scenario.{name}.unknown", True, str(res), "", "no exact path; not a failure"))
            continue
        for n in (0, 1, 2, 5):
            rep = osc_preserved_under_shift(F, ifs.space, n)
            cases.append(Case(f"osc.scenario.{name}.shift{n}", rep.passed, str(rep.after), "Satisfied",
                              f"{len(distinct_system(shift(F, n)))} of {len(ifs)} maps"))
        bad = 0
        for k in range(1, len(ifs)):
            for combo in itertools.combinations(range(len(ifs)), k):
                sub = finite_ifs(F.alphabet, [ifs.names[i] for i in combo])
                bad += not osc_check(sub, ifs.space).satisfied
        cases.append(Case(f"osc.scenario.{name}.subsets", bad == 0, bad, 0, "every proper subset keeps the condition"))

    # random diagonal and rotated systems: verdicts from the exact paths agree with dense sampling
    disagree = 0
    X = SpaceBox.unit(2)
    for _ in range(30):
        alph = random_alphabet(rng, X, 2)
        ifs = finite_ifs(alph, alph.names)
        res = osc_check(ifs, X)
        if res.verdict is OscVerdict.VIOLATED and res.reason == "overlap":
            disagree += not witness_inside(ifs, res)
    cases.append(Case("osc.random_witnesses", disagree == 0, disagree, 0, "30 random pairs"))
    return cases, data


RUNNERS = {
    "metrics": suite_metrics,
    "shift": suite_shift,
    "periodic": suite_periodic,
    "dimension": suite_dimension,
    "osc": suite_osc,
}


def run_suites(names, scenario=None, seed=42, **kw):
    cases, data = [], {}
    for name in names:
        c, d = RUNNERS[name](scenario, seed, **kw.get(name, {}))
        cases += c
        data.update(d)
    return cases, data
