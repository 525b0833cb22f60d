"""Scenario files: one JSON document describing an election or an audit.

Example::

    {
      "schema": "mixvote.scenario/1",
      "name": "sample",
      "seed": 7,
      "election": {"v": 3, "c": 3, "mode": "single", "code_digits": 10},
      "mix": {"t": 1, "setsystem": "disjoint", "transfer_mode": "reshare", "protocol": "p2"},
      "adversary": {"corruptions": "all-subsets-<=t", "observer": true},
      "intents": {"1": [2], "2": [1], "3": [2]}
    }

Unknown keys anywhere are rejected; a typo in a security parameter should
stop the run, not be ignored.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .groups import GroupSpec, Kind, bits, digits, parse_spec, perms
from .mixnet import ConfigError, Engine, MixConfig, Protocol
from .setsystem import (
    InfeasibleError,
    SetSystem,
    TransferMode,
    VerificationIntractable,
    build_disjoint,
    build_greedy,
    check_confinement,
    verify_verifiers,
)
from .voter import check_intent
from .voting import SeatMode, normalize_intents

SCHEMA_ID = "mixvote.scenario/1"
ALL_SUBSETS = "all-subsets-<=t"
SEED_ENV = "MIXVOTE_SEED"

_PARTY = {"type": "string", "pattern": "^(server:[0-9]+|device:[0-9]+:[0-9]+)$"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "election", "mix"],
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer"},
        "election": {
            "type": "object",
            "additionalProperties": False,
            "required": ["v", "c"],
            "properties": {
                "v": {"type": "integer", "minimum": 1},
                "c": {"type": "integer", "minimum": 1},
                "mode": {"enum": ["single", "multi"]},
                "seats": {"type": ["integer", "null"], "minimum": 1},
                "code_digits": {"type": "integer", "minimum": 1},
            },
        },
        "mix": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t"],
            "properties": {
                "t": {"type": "integer", "minimum": 0},
                "setsystem": {"enum": ["disjoint", "greedy", "file"]},
                "m": {"type": "integer", "minimum": 1},
                "file": {"type": "string"},
                "transfer_mode": {"enum": [m.value for m in TransferMode]},
                "protocol": {"enum": [p.value for p in Protocol]},
                "engine": {"enum": [e.value for e in Engine]},
                "carrier": {"type": "string", "pattern": "^(bits|digits|perm):[0-9]+$"},
            },
        },
        "adversary": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "corruptions": {
                    "oneOf": [
                        {"const": ALL_SUBSETS},
                        {"type": "array", "items": {"type": "array", "items": _PARTY, "uniqueItems": True}},
                    ]
                },
                "max_size": {"type": "integer", "minimum": 0},
                "observer": {"type": "boolean"},
                "budget": {"type": "integer", "minimum": 1},
            },
        },
        "intents": {
            "type": "object",
            "additionalProperties": False,
            "patternProperties": {
                "^[0-9]+$": {"type": "array", "items": {"type": "integer", "minimum": 1}, "uniqueItems": True}
            },
        },
    },
}


class ScenarioError(ValueError):
    """Invalid scenario; ``field`` is a dotted path to the offending entry."""

    def __init__(self, field: str, msg: str):
        super().__init__(f"{field}: {msg}")
        self.field = field


@dataclass(frozen=True)
class AdversarySpec:
    corruptions: object = ALL_SUBSETS  # ALL_SUBSETS or a tuple of tuples of party ids
    max_size: int | None = None
    observer: bool = True
    budget: int | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int | None
    v: int
    c: int
    mode: SeatMode
    code_digits: int
    t: int
    setsystem: SetSystem
    transfer_mode: TransferMode
    protocol: Protocol
    engine: Engine
    carrier: GroupSpec
    adversary: AdversarySpec
    intents: dict = field(default_factory=dict)
    source: str = ""

    @property
    def bundle_width(self) -> int:
        return self.c if self.protocol is Protocol.P2 else 1

    @property
    def is_election(self) -> bool:
        return self.protocol is not Protocol.P1

    def mix_config(self) -> MixConfig:
        dealer = "receiver" if self.protocol is Protocol.P1 else "cge"
        return MixConfig(self.setsystem, self.carrier, self.protocol, self.transfer_mode,
                         self.bundle_width, self.engine, dealer)


def resolve_seed(scenario: Scenario, override: int | None = None) -> int:
    """--seed beats the file, the file beats MIXVOTE_SEED, and 0 is the last resort."""
    if override is not None:
        return int(override)
    if scenario.seed is not None:
        return scenario.seed
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise ScenarioError(SEED_ENV, f"not an integer: {env!r}") from None
    return 0


def _path(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    return ".".join(parts) if parts else "(root)"


def _carrier(text: str) -> GroupSpec:
    try:
        return parse_spec(text)
    except ValueError as exc:
        raise ScenarioError("mix.carrier", str(exc)) from None


def _setsystem(mix: dict, t: int, base_dir: Path) -> SetSystem:
    how = mix.get("setsystem", "disjoint")
    if how == "disjoint":
        return build_disjoint(t)
    if how == "greedy":
        m = mix.get("m")
        if m is None:
            raise ScenarioError("mix.m", "greedy set systems need the universe size m")
        try:
            return build_greedy(m, t)
        except (InfeasibleError, VerificationIntractable) as exc:
            raise ScenarioError("mix.m", str(exc)) from None
    path = mix.get("file")
    if not path:
        raise ScenarioError("mix.file", "setsystem 'file' needs a path")
    p = Path(path)
    if not p.is_absolute():
        p = base_dir / p
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
        s = SetSystem.from_json(obj)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ScenarioError("mix.file", f"cannot load set system: {exc}") from None
    if s.t != t:
        raise ScenarioError("mix.t", f"scenario says t={t} but {p.name} says t={s.t}")
    return s


def parse(obj: dict, base_dir: Path | str = ".", source: str = "") -> Scenario:
    """Validate a decoded scenario document and build a :class:`Scenario`."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(obj), key=lambda e: [str(x) for x in e.absolute_path])
    if errors:
        e = errors[0]
        raise ScenarioError(_path(e), e.message)

    el = obj["election"]
    mix = obj["mix"]
    v, c, t = el["v"], el["c"], mix["t"]
    mode_name = el.get("mode", "multi" if el.get("seats") else "single")
    if mode_name == "multi":
        seats = el.get("seats")
        if seats is None:
            raise ScenarioError("election.seats", "multi-seat elections need a seat count")
        if seats > c:
            raise ScenarioError("election.seats", f"{seats} seats exceed {c} candidates")
        mode = SeatMode.multi_seat(seats)
    else:
        if el.get("seats") is not None:
            raise ScenarioError("election.seats", "single-seat elections take no seat count")
        mode = SeatMode.single()
    code_digits = el.get("code_digits", 10)

    default_protocol = "p3" if mode.multi else "p2"
    protocol = Protocol(mix.get("protocol", default_protocol))
    if mode.multi and protocol is not Protocol.P3:
        raise ScenarioError("mix.protocol", "multi-seat elections run over p3")
    if not mode.multi and protocol is Protocol.P3:
        raise ScenarioError("mix.protocol", "p3 carries permutations; use mode 'multi'")

    if "carrier" in mix:
        carrier = _carrier(mix["carrier"])
    elif protocol is Protocol.P1:
        carrier = bits(1)
    elif protocol is Protocol.P2:
        carrier = digits(code_digits)
    else:
        carrier = perms(c)
    if protocol is Protocol.P3 and carrier != perms(c):
        raise ScenarioError("mix.carrier", f"p3 carries perm:{c}")
    if protocol is Protocol.P2 and carrier.kind is Kind.PERM:
        raise ScenarioError("mix.carrier", "p2 needs an Abelian carrier")
    if protocol is Protocol.P2 and "carrier" in mix and carrier != digits(code_digits) and "code_digits" in el:
        raise ScenarioError("mix.carrier", "carrier disagrees with election.code_digits")

    s = _setsystem(mix, t, Path(base_dir))
    transfer = TransferMode(mix.get("transfer_mode", "reshare"))
    engine = Engine(mix.get("engine", "ideal"))

    try:
        rep = verify_verifiers(s)
        conf = check_confinement(s) if transfer is TransferMode.CONFINEMENT else None
    except VerificationIntractable as exc:
        raise ScenarioError("mix.setsystem", str(exc)) from None
    if not rep:
        raise ScenarioError("mix.setsystem", f"not a verifier set system ({rep.condition}): {rep.detail}")
    if conf is not None and not conf:
        raise ScenarioError("mix.transfer_mode", f"confinement mode needs a system passing {conf.condition}: {conf.detail}")

    adv = obj.get("adversary", {})
    corr = adv.get("corruptions", ALL_SUBSETS)
    if corr != ALL_SUBSETS:
        corr = tuple(tuple(sorted(cs)) for cs in corr)
    adversary = AdversarySpec(corr, adv.get("max_size"), adv.get("observer", True), adv.get("budget"))

    try:
        intents = normalize_intents(obj.get("intents", {}), v)
        for i, choice in intents.items():
            check_intent(choice, c, mode.seats)
    except ValueError as exc:
        raise ScenarioError("intents", str(exc)) from None

    sc = Scenario(obj.get("name", "scenario"), obj.get("seed"), v, c, mode, code_digits, t, s, transfer,
                  protocol, engine, carrier, adversary, intents, source)
    try:
        sc.mix_config().validate()
    except ConfigError as exc:
        raise ScenarioError(f"mix.{exc.field}", str(exc)) from None
    return sc


def load(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError("(file)", str(exc)) from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("(json)", str(exc)) from None
    if not isinstance(obj, dict):
        raise ScenarioError("(root)", "a scenario is a JSON object")
    return parse(obj, p.parent, str(p))
