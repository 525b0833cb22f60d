"""Command-line front end.

    mixvote run SCENARIO [--out DIR] [--seed N]
    mixvote audit SCENARIO [--privacy] [--anonymity] [--negative-controls] [--method M] [--timing] [--out FILE]
    mixvote setsystem build (--disjoint | --greedy -m M) -t T [--seed N] [--out FILE]
    mixvote setsystem verify|confinement FILE
    mixvote setsystem dagcut FILE [--mode reshare|confinement]
    mixvote replay TRANSCRIPT --codebook CGE.json [--tally TALLY.json]

Exit codes: 0 success, 1 invalid input, 2 a property or audit check failed,
3 an audit exceeded its enumeration budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .adversary.audit import (
    DEFAULT_BUDGET,
    FAIL,
    INTRACTABLE,
    PASS,
    AuditScenario,
    CaseResult,
    anonymity_experiment,
    corruption_family,
    negative_controls,
    privacy_experiment,
    run_cases,
)
from .adversary.views import CorruptionSet
from .mixnet import ConfigError, Protocol
from .rng import SeededSource
from .scenario import ALL_SUBSETS, Scenario, ScenarioError, load, resolve_seed
from .setsystem import (
    InfeasibleError,
    SetSystem,
    TransferMode,
    VerificationIntractable,
    build_dag,
    build_disjoint,
    build_greedy,
    check_confinement,
    check_t_cut,
    verify_verifiers,
)
from .transcript import read_jsonl
from .voting import CodeBook, decode_and_tally, expected_tally, recovered_from_records, run_election

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2
EXIT_INTRACTABLE = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; here 2 means a failed check."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# run

def cmd_run(args) -> int:
    sc = load(args.scenario)
    if not sc.is_election:
        raise ScenarioError("mix.protocol", "p1 scenarios carry no election; use 'audit'")
    seed = resolve_seed(sc, args.seed)
    out = run_election(sc.v, sc.c, sc.mode, sc.setsystem, sc.intents, SeededSource(seed),
                       transfer_mode=sc.transfer_mode, code_spec=sc.carrier if not sc.mode.multi else None,
                       engine=sc.engine, run_id=f"{sc.name}/{seed}")
    tally = out.tally.to_json()
    want = expected_tally(sc.intents, sc.v, sc.c)
    ok = out.tally.counts == want and out.tally.rejected == 0
    summary = {
        "scenario": sc.name,
        "seed": seed,
        "tally": tally,
        "expected": {str(k): n for k, n in sorted(want.items())},
        "matches_intents": ok,
        "events": len(out.transcript),
        "transcript_sha256": out.transcript.sha256(),
    }
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        out.transcript.write(d / "transcript.jsonl")
        _write(d / "tally.json", _dump(tally))
        _write(d / "cge.json", _dump(out.book.to_json()))
    sys.stdout.write(_dump(summary))
    return EXIT_OK if ok else EXIT_FAILED


# audit

def audit_scenario_of(sc: Scenario) -> AuditScenario:
    return AuditScenario(sc.protocol, sc.carrier, sc.v, sc.setsystem, sc.bundle_width, sc.transfer_mode,
                         sc.engine, sc.name)


def _explicit_sets(sc: Scenario, observer: str | None) -> list[CorruptionSet]:
    sets = [CorruptionSet(frozenset(cs)) for cs in sc.adversary.corruptions]
    if sc.adversary.observer and observer is not None:
        sets += [CorruptionSet(frozenset(cs), observer) for cs in sc.adversary.corruptions]
    return sets


def _cases(sc: Scenario, exp, method: str, budget: int) -> list[CaseResult]:
    adv = sc.adversary
    if adv.corruptions == ALL_SUBSETS:
        sets = corruption_family(exp, adv.max_size, with_observer=adv.observer and exp.prop == "anonymity")
    else:
        sets = _explicit_sets(sc, exp.observer if exp.prop == "anonymity" else None)
    within = [cs for cs in sets if cs.size() <= sc.t]
    beyond = [cs for cs in sets if cs.size() > sc.t]
    out = run_cases(exp, within, PASS, method, budget) if within else []
    if beyond:
        # no claim is made past t; the distance is reported for information
        out += run_cases(exp, beyond, "none", method, budget, check_honesty=False)
    return out


def run_audit(sc: Scenario, privacy: bool = True, anonymity: bool = True, negative: bool = False,
              method: str = "auto", budget: int | None = None) -> list[CaseResult]:
    budget = budget or sc.adversary.budget or DEFAULT_BUDGET
    asc = audit_scenario_of(sc)
    cases: list[CaseResult] = []
    if privacy:
        cases += _cases(sc, privacy_experiment(asc, "payload"), method, budget)
        if sc.protocol is Protocol.P1:
            cases += _cases(sc, privacy_experiment(asc, "message"), method, budget)
    if anonymity:
        cases += _cases(sc, anonymity_experiment(asc), method, budget)
    if negative:
        cases += negative_controls(asc, method, budget)
    return cases


def audit_exit_code(cases) -> int:
    failed = any(c.expected in (PASS, FAIL) and c.verdict != INTRACTABLE and c.verdict != c.expected
                 for c in cases)
    if failed:
        return EXIT_FAILED
    if any(c.verdict == INTRACTABLE for c in cases):
        return EXIT_INTRACTABLE
    return EXIT_OK


def audit_report(sc: Scenario, seed: int, cases, timing: bool) -> dict:
    rows = []
    for c in cases:
        row = c.to_json(timing)
        row["scenario"] = f"{sc.name}:{c.experiment.split('/', 1)[-1]}"
        if c.expected not in (PASS, FAIL):
            row["expected"] = None
        rows.append(row)
    counts = {PASS: 0, FAIL: 0, INTRACTABLE: 0}
    for c in cases:
        counts[c.verdict] += 1
    return {"scenario": sc.name, "seed": seed, "cases": rows,
            "summary": {"cases": len(cases), "pass": counts[PASS], "fail": counts[FAIL],
                        "intractable": counts[INTRACTABLE], "exit_code": audit_exit_code(cases)}}


def cmd_audit(args) -> int:
    sc = load(args.scenario)
    seed = resolve_seed(sc, args.seed)
    privacy, anonymity = args.privacy, args.anonymity
    if not (privacy or anonymity):
        privacy = anonymity = True
    cases = run_audit(sc, privacy, anonymity, args.negative_controls, args.method, args.budget)
    report = audit_report(sc, seed, cases, args.timing)
    text = _dump(report)
    if args.out:
        _write(Path(args.out), text)
    sys.stdout.write(text)
    return report["summary"]["exit_code"]


# setsystem

def _load_system(path) -> SetSystem:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return SetSystem.from_json(obj)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read set system {path}: {exc}") from None


def _verdict(rep) -> dict:
    return {"ok": rep.ok, "condition": rep.condition,
            "witness": sorted(rep.witness) if rep.witness is not None else None, "detail": rep.detail}


def cmd_setsystem(args) -> int:
    if args.sub == "build":
        if args.greedy:
            if args.m is None:
                raise UsageError("--greedy needs -m")
            rng = SeededSource(args.seed) if args.seed is not None else None
            s = build_greedy(args.m, args.t, rng)
        else:
            s = build_disjoint(args.t)
        text = s.dumps() + "\n"
        if args.out:
            _write(Path(args.out), text)
        sys.stdout.write(text)
        return EXIT_OK
    s = _load_system(args.file)
    if args.sub == "verify":
        rep = verify_verifiers(s)
    elif args.sub == "confinement":
        rep = check_confinement(s)
    else:
        rep = check_t_cut(build_dag(s, args.mode), s.t)
    out = {"check": args.sub, "m": s.m, "t": s.t, "b": s.b, **_verdict(rep)}
    if args.sub == "dagcut":
        out["mode"] = TransferMode(args.mode).value
    sys.stdout.write(_dump(out))
    return EXIT_OK if rep.ok else EXIT_FAILED


# replay

def cmd_replay(args) -> int:
    try:
        records = read_jsonl(args.transcript)
        book = CodeBook.from_json(json.loads(Path(args.codebook).read_text(encoding="utf-8")))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot replay: {exc}") from None
    tally = decode_and_tally(recovered_from_records(records, book), book).to_json()
    out = {"events": len(records), "tally": tally}
    code = EXIT_OK
    if args.tally:
        try:
            recorded = json.loads(Path(args.tally).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read tally: {exc}") from None
        out["matches_recorded"] = recorded == tally
        code = EXIT_OK if recorded == tally else EXIT_FAILED
    sys.stdout.write(_dump(out))
    return code


# wiring

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mixvote", description="Share-based MIX voting simulator and exact auditor.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run an election end to end")
    r.add_argument("scenario")
    r.add_argument("--out", help="directory for transcript.jsonl, tally.json, cge.json")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("audit", help="exact privacy/anonymity audit")
    a.add_argument("scenario")
    a.add_argument("--privacy", action="store_true")
    a.add_argument("--anonymity", action="store_true")
    a.add_argument("--negative-controls", action="store_true", help="also run cases that must FAIL")
    a.add_argument("--method", choices=["auto", "affine", "brute"], default="auto")
    a.add_argument("--budget", type=int, help=f"state budget (default {DEFAULT_BUDGET})")
    a.add_argument("--timing", action="store_true", help="report wall times (makes reports non-reproducible)")
    a.add_argument("--out", help="also write the report to this file")
    a.add_argument("--seed", type=int)
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("setsystem", help="build or check server set systems")
    ss = s.add_subparsers(dest="sub", required=True)
    b = ss.add_parser("build")
    kind = b.add_mutually_exclusive_group(required=True)
    kind.add_argument("--disjoint", action="store_true")
    kind.add_argument("--greedy", action="store_true")
    b.add_argument("-t", type=int, required=True)
    b.add_argument("-m", type=int)
    b.add_argument("--seed", type=int, help="relabel servers of a greedy system")
    b.add_argument("--out")
    for name in ("verify", "confinement", "dagcut"):
        c = ss.add_parser(name)
        c.add_argument("file")
        if name == "dagcut":
            c.add_argument("--mode", choices=[m.value for m in TransferMode], default="reshare")
    s.set_defaults(func=cmd_setsystem)

    rp = sub.add_parser("replay", help="re-derive a tally from a transcript file")
    rp.add_argument("transcript")
    rp.add_argument("--codebook", required=True)
    rp.add_argument("--tally", help="recorded tally.json to compare against")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ConfigError, UsageError, InfeasibleError, VerificationIntractable) as exc:
        sys.stderr.write(f"mixvote: error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
