import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from ifsdyn.dimension import (
    Method,
    evolved_dimension,
    moran_dimension,
    moran_sum,
    similarity_dimension,
    uniform_dimension,
)
from ifsdyn.dynamics import EvolutionOperator, evolve
from ifsdyn.errors import InvalidRatio
from ifsdyn.metric import ContractionAlphabet, SpaceBox
from ifsdyn.sequence import distinct_system, embed_finite, finite_ifs


def test_uniform_examples():
    assert uniform_dimension(3, 0.5).s == pytest.approx(math.log2(3), abs=1e-15)
    assert uniform_dimension(2, 1 / 3).s == pytest.approx(math.log(2) / math.log(3), abs=1e-15)
    assert uniform_dimension(4, 0.5).s == 2.0
    assert uniform_dimension(1, 0.5).s == 0.0


def test_invalid_ratios():
    for r in (0.0, 1.0, -0.5, 1.5, "x"):
        with pytest.raises(InvalidRatio):
            uniform_dimension(2, r)
    with pytest.raises(InvalidRatio):
        moran_dimension([0.5, 1.0])
    with pytest.raises(InvalidRatio):
        evolved_dimension(1.0, 0.5, 1.0)


def test_moran_matches_brentq(rng):
    for _ in range(200):
        ratios = rng.uniform(0.01, 0.95, size=rng.integers(2, 8))
        rep = moran_dimension(ratios)
        oracle = brentq(lambda s: sum(ratios**s) - 1, 0, 200, xtol=1e-15)
        assert rep.s == pytest.approx(oracle, abs=1e-10)
        assert rep.residual <= 1e-12
        assert rep.method is Method.MORAN


def test_moran_large_dimension():
    # many tiny maps need the bracket doubling
    rep = moran_dimension([0.01] * 10**6)
    assert rep.s == pytest.approx(3.0, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(
    ratios=st.lists(st.floats(0.05, 0.9), min_size=2, max_size=6),
    extra=st.floats(0.05, 0.9),
)
def test_moran_monotone(ratios, extra):
    s = moran_dimension(ratios).s
    assert moran_dimension(ratios + [extra]).s > s
    assert moran_dimension([r * 0.9 for r in ratios]).s < s


def test_moran_sum():
    assert moran_sum([0.5, 0.5], 1.0) == 1.0


def test_evolved_dimension_half():
    s = uniform_dimension(3, 0.5).s
    rep = evolved_dimension(s, 0.5, 0.25)
    assert rep.s == pytest.approx(math.log2(3) / 2, abs=1e-15)
    assert rep.s == pytest.approx(uniform_dimension(3, 0.25).s, abs=1e-12)


def test_two_paths_random(rng):
    for _ in range(100):
        m = int(rng.integers(2, 9))
        r = rng.uniform(0.05, 1 / m)
        t = rng.uniform(0, 5)
        s = uniform_dimension(m, r).s
        q = math.exp(-t) * r
        assert evolved_dimension(s, r, q).s == pytest.approx(moran_dimension([q] * m).s, abs=1e-10)


def test_similarity_dimension_systems(sierpinski):
    rep = similarity_dimension(sierpinski)
    assert rep.method is Method.UNIFORM
    assert rep.s == pytest.approx(math.log2(3), abs=1e-15)
    X = SpaceBox.unit(1)
    alphabet = ContractionAlphabet.build(X, {"a": ([[0.5]], [0.0]), "b": ([[0.25]], [0.75])})
    rep = similarity_dimension(finite_ifs(alphabet, ("a", "b")))
    # 2**-s + 4**-s = 1 has 2**-s equal to the golden ratio conjugate
    assert rep.s == pytest.approx(-math.log2((math.sqrt(5) - 1) / 2), abs=1e-12)


def test_similarity_needs_similarities(unit2):
    alphabet = ContractionAlphabet.build(unit2, {"a": ([[0.5, 0.0], [0.0, 0.25]], [0.0, 0.0])})
    with pytest.raises(InvalidRatio):
        similarity_dimension(finite_ifs(alphabet, ("a",)))


def test_scaled_system_dimension(sierpinski):
    F = embed_finite(sierpinski)
    op = EvolutionOperator.scale_exp()
    for t in np.linspace(0, 2, 9):
        E = distinct_system(evolve(op, F, t))
        q = op.ratio_action(0.5, t)
        assert similarity_dimension(E).s == pytest.approx(uniform_dimension(3, q).s, abs=1e-10)
