import textwrap

import pytest

from ifsdyn.dynamics import OperatorKind
from ifsdyn.errors import ParseError, ValidationError
from ifsdyn.scenario import bundled_scenarios, load_scenario, parse_scenario, serialize_scenario
from ifsdyn.sequence import DEFAULT_TOLERANCE

MINIMAL = """
space: {lower: [0], upper: [1]}
alphabet:
  a: {matrix: [[0.5]], offset: [0]}
"""


def test_minimal():
    sc = parse_scenario(MINIMAL)
    assert sc.space.dim == 1
    assert sc.alphabet.names == ("a",)
    assert sc.sequences == {} and sc.operators == {}
    assert sc.defaults.tolerance == DEFAULT_TOLERANCE
    assert sc.defaults.resolution == 512 and sc.defaults.seed == 42


def test_sierpinski_bundled():
    sc = load_scenario("sierpinski")
    assert sc.space.dim == 2
    sier = sc.sequence("sierpinski")
    assert sier.symbols() == ("f1", "f2", "f3")
    assert all(sc.alphabet[n].ratio == 0.5 for n in ("f1", "f2", "f3"))
    assert sc.operator("decay").kind is OperatorKind.SCALE
    assert sc.sequence("stream").is_generated


def test_bundled_names():
    assert bundled_scenarios() == ["cantor", "sierpinski"]


def test_not_contractive_names_map():
    text = MINIMAL + "  big: {matrix: [[1.2]], offset: [0]}\n"
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert err.value.entity == "big"
    assert err.value.reason == "NotContractive"


def test_escaping_map():
    text = MINIMAL + "  far: {matrix: [[0.5]], offset: [0.9]}\n"
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert err.value.reason == "EscapesSpace"


def test_malformed_yaml_position():
    with pytest.raises(ParseError) as err:
        parse_scenario("space: {lower: [0], upper: [1]\nalphabet: [")
    assert "line" in str(err.value) and "column" in str(err.value)


@pytest.mark.parametrize(
    "extra, where",
    [
        ("sequences:\n  s: {nothing: 1}\n", "sequences.s"),
        ("operators:\n  o: {kind: spin}\n", "operators.o"),
        ("colour: red\n", "top level"),
        ("defaults: {speed: 3}\n", "defaults"),
    ],
)
def test_parse_error_paths(extra, where):
    with pytest.raises(ParseError) as err:
        parse_scenario(MINIMAL + extra)
    assert err.value.position == where


def test_unknown_symbol_in_sequence():
    with pytest.raises(ValidationError) as err:
        parse_scenario(MINIMAL + "sequences:\n  s: {period: [zz]}\n")
    assert err.value.entity == "s"


def test_scale_needs_origin():
    text = textwrap.dedent("""
        space: {lower: [1], upper: [2]}
        alphabet:
          a: {matrix: [[0.5]], offset: [0.75]}
        operators:
          d: {kind: scale}
    """)
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert err.value.reason == "OriginNotInSpace"


@pytest.mark.parametrize("name", ["sierpinski", "cantor"])
def test_round_trip(name):
    sc = load_scenario(name)
    text = serialize_scenario(sc)
    again = parse_scenario(text)
    assert again.space == sc.space
    assert again.alphabet == sc.alphabet
    assert again.sequences == sc.sequences
    assert again.operators == sc.operators
    assert again.defaults == sc.defaults
    assert serialize_scenario(again) == text


def test_load_from_path(tmp_path):
    p = tmp_path / "m.yaml"
    p.write_text(MINIMAL)
    assert load_scenario(str(p)).alphabet.names == ("a",)
    with pytest.raises(ParseError):
        load_scenario(str(tmp_path / "missing.yaml"))
