"""Scenario documents: the space, the alphabet, named sequences and operators.

A scenario is a YAML document with five top-level keys::

    space:
      lower: [0, 0]
      upper: [1, 1]
    alphabet:                    # name -> matrix (row-major) and offset
      f1: {matrix: [[0.5, 0], [0, 0.5]], offset: [0, 0]}
    sequences:                   # one of: embed / period (+ preperiod) / blocks (+ offset)
      sierpinski: {embed: [f1, f2, f3]}
      cycle: {preperiod: [f1], period: [f2, f3]}
      stream: {blocks: [f1, f2]}
    operators:
      shift: {kind: shift}
      decay: {kind: scale}
    defaults: {tolerance: 9.094947017729282e-13, resolution: 512, seed: 42, horizon: 10000}

Only ``space`` and ``alphabet`` are required.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .dynamics import EvolutionOperator, OperatorKind
from .errors import IfsError, ParseError, ValidationError
from .metric import ContractionAlphabet, SpaceBox
from .sequence import (
    DEFAULT_HORIZON,
    DEFAULT_TOLERANCE,
    BlockEnumeration,
    EventuallyPeriodic,
    IfsSequence,
    embed_finite,
    normalize,
)

TOP_LEVEL = ("space", "alphabet", "sequences", "operators", "defaults")


@dataclass(frozen=True)
class Defaults:
    tolerance: float = DEFAULT_TOLERANCE
    resolution: int = 512
    seed: int = 42
    horizon: int = DEFAULT_HORIZON


@dataclass
class Scenario:
    space: SpaceBox
    alphabet: ContractionAlphabet
    sequences: dict = field(default_factory=dict)
    operators: dict = field(default_factory=dict)
    defaults: Defaults = field(default_factory=Defaults)

    def sequence(self, name):
        try:
            return self.sequences[name]
        except KeyError:
            raise ValidationError(f"unknown sequence {name!r}", name) from None

    def operator(self, name):
        try:
            return self.operators[name]
        except KeyError:
            raise ValidationError(f"unknown operator {name!r}", name) from None


def _require(mapping, key, where):
    if not isinstance(mapping, dict):
        raise ParseError("expected a mapping", where)
    if key not in mapping:
        raise ParseError(f"missing key {key!r}", where)
    return mapping[key]


def _names(value, where):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError("expected a list of symbol names", where)
    return tuple(value)


def _numbers(value, where):
    if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ParseError("expected a list of numbers", where)
    return [float(v) for v in value]


def _parse_sequence(alphabet, name, spec):
    where = f"sequences.{name}"
    if not isinstance(spec, dict):
        raise ParseError("expected a mapping", where)
    try:
        if "embed" in spec:
            return embed_finite((alphabet, _names(spec["embed"], where + ".embed")))
        if "blocks" in spec:
            offset = spec.get("offset", 0)
            if not isinstance(offset, int) or isinstance(offset, bool):
                raise ParseError("offset must be an integer", where + ".offset")
            return IfsSequence(alphabet, BlockEnumeration(_names(spec["blocks"], where + ".blocks"), offset))
        if "period" in spec:
            pre = _names(spec.get("preperiod", []), where + ".preperiod")
            return normalize(IfsSequence(alphabet, EventuallyPeriodic(pre, _names(spec["period"], where + ".period"))))
    except ParseError:
        raise
    except IfsError as exc:
        raise ValidationError(f"sequence {name!r}: {exc}", name, exc.code) from exc
    raise ParseError("sequence needs one of 'embed', 'period' or 'blocks'", where)


def parse_scenario(text):
    """Parse and fully validate a scenario document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        pos = f"line {mark.line + 1}, column {mark.column + 1}" if mark else None
        raise ParseError(f"malformed document: {getattr(exc, 'problem', exc)}", pos) from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a mapping", "top level")
    unknown = set(doc) - set(TOP_LEVEL)
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", "top level")

    sp = _require(doc, "space", "top level")
    try:
        space = SpaceBox(_numbers(_require(sp, "lower", "space"), "space.lower"),
                         _numbers(_require(sp, "upper", "space"), "space.upper"))
    except ValidationError as exc:
        raise ValidationError(f"space: {exc}", "space") from exc

    raw = _require(doc, "alphabet", "top level")
    if not isinstance(raw, dict) or not raw:
        raise ParseError("alphabet must be a nonempty mapping", "alphabet")
    maps = {}
    for name, entry in raw.items():
        where = f"alphabet.{name}"
        matrix = _require(entry, "matrix", where)
        if not isinstance(matrix, list):
            raise ParseError("matrix must be a nested list", where + ".matrix")
        rows = [_numbers(r, f"{where}.matrix[{i}]") for i, r in enumerate(matrix)]
        maps[str(name)] = (rows, _numbers(_require(entry, "offset", where), where + ".offset"))
    try:
        alphabet = ContractionAlphabet.build(space, maps)
    except ValidationError:
        raise
    except IfsError as exc:
        raise ValidationError(str(exc), "alphabet", exc.code) from exc

    sequences = {str(n): _parse_sequence(alphabet, str(n), s) for n, s in (doc.get("sequences") or {}).items()}

    operators = {}
    for name, spec in (doc.get("operators") or {}).items():
        kind = _require(spec, "kind", f"operators.{name}")
        try:
            operators[str(name)] = EvolutionOperator(OperatorKind(kind), str(name))
        except ValueError:
            raise ParseError(f"operator kind must be 'shift' or 'scale', got {kind!r}", f"operators.{name}") from None
        if operators[str(name)].kind is OperatorKind.SCALE and not space.contains_origin():
            raise ValidationError(f"operator {name!r}: scaling needs the origin in the space", str(name), "OriginNotInSpace")

    d = doc.get("defaults") or {}
    if not isinstance(d, dict):
        raise ParseError("defaults must be a mapping", "defaults")
    extra = set(d) - {"tolerance", "resolution", "seed", "horizon"}
    if extra:
        raise ParseError(f"unknown defaults {sorted(extra)}", "defaults")
    defaults = Defaults(**{k: (float(v) if k == "tolerance" else int(v)) for k, v in d.items()})
    return Scenario(space, alphabet, sequences, operators, defaults)


def _plain(values):
    return [float(v) for v in values]


def scenario_to_dict(sc):
    seqs = {}
    for name, seq in sc.sequences.items():
        rep = seq.rep
        if isinstance(rep, BlockEnumeration):
            seqs[name] = {"blocks": list(rep.symbol_order), "offset": rep.offset}
        else:
            seqs[name] = {"preperiod": list(rep.preperiod), "period": list(rep.period)}
    return {
        "space": {"lower": _plain(sc.space.lower), "upper": _plain(sc.space.upper)},
        "alphabet": {
            n: {"matrix": [_plain(r) for r in m.matrix], "offset": _plain(m.offset)}
            for n, m in sc.alphabet.entries
        },
        "sequences": seqs,
        "operators": {n: {"kind": op.kind.value} for n, op in sc.operators.items()},
        "defaults": {
            "tolerance": sc.defaults.tolerance,
            "resolution": sc.defaults.resolution,
            "seed": sc.defaults.seed,
            "horizon": sc.defaults.horizon,
        },
    }


def serialize_scenario(sc):
    return yaml.safe_dump(scenario_to_dict(sc), sort_keys=False, default_flow_style=None)


def bundled_scenarios():
    root = resources.files("ifsdyn") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_scenario(ref):
    """Load a scenario from a path, or by the name of a bundled scenario."""
    path = Path(ref)
    if path.is_file():
        return parse_scenario(path.read_text())
    bundled = resources.files("ifsdyn") / "scenarios" / f"{ref}.yaml"
    if bundled.is_file():
        return parse_scenario(bundled.read_text())
    raise ParseError(f"no scenario file or bundled scenario named {ref!r}")
