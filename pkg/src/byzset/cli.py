"""Scenario-driven command line runner.

    byzset certify <graph-file> [--f K]
    byzset check <instance-file> --property {b,c,3f,d} [--graph <file>]
    byzset run <scenario-file> [--jobs N] [--format text|structured]
    byzset optimize <profile-file> --graph <file>

A scenario file is a graph plus an instance (or cost profile) in the shared
text formats, extended with `mode`, `adversary`, `faults`, `seed`,
`max_rounds`, and `schedule` lines. `faults sweep_all` crosses every fault
placement of size <= f with the adversary catalogue. Exit status: 0 all
conditions hold / runs converged, 1 something failed, 2 usage or parse error.
The enumeration budget honors the BYZSET_BUDGET environment variable.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import attacks, conditions, formats, optbridge, protocols, redundancy, simnet
from .adversary import default_catalogue, relay_catalogue, strategy_by_name, strategy_honest
from .graph import DEFAULT_BUDGET, CommGraph, bits

MODES = (
    "certify",
    "check_redundancy",
    "run_constrained",
    "run_unconstrained",
    "run_async",
    "run_centralized",
    "optimize",
    "attack_demo",
)

_FIELD_ORDER = (
    "run", "mode", "check", "f", "faults", "adversary", "seed", "schedule",
    "holds", "converged", "rounds", "output", "victim", "indistinguishable",
    "targets_differ", "witness", "ok", "error",
)


class ScenarioError(ValueError):
    """Semantic scenario validation failure."""


@dataclass
class Scenario:
    mode: str
    graph: Optional[CommGraph] = None
    graph_f: Optional[int] = None
    instance: Optional[redundancy.SetInstance] = None
    profile: Optional[optbridge.CostProfile] = None
    fault_spec: object = frozenset()  # frozenset of ids or "sweep_all"
    adversary_spec: object = ("honest", [])  # (name, args) or "catalogue"
    seed: int = 0
    max_rounds: Optional[int] = None
    schedule_policy: str = "random_delay"
    schedule_args: tuple = ()
    properties: tuple = ()
    source_text: str = ""

    @property
    def f(self) -> int:
        if self.instance is not None:
            return self.instance.f
        if self.profile is not None:
            return self.profile.f
        return self.graph_f or 0


@dataclass
class Report:
    records: list = field(default_factory=list)
    max_rounds_observed: int = 0

    @property
    def runs(self) -> int:
        return len(self.records)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if r.get("ok") != "true")

    @property
    def all_ok(self) -> bool:
        return self.failures == 0


def parse_scenario(text: str) -> Scenario:
    """Parse and semantically validate one scenario file."""
    graph_lines, inst_lines, profile_lines = [], [], []
    directives = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head in ("n", "edge"):
            graph_lines.append(line)
        elif head == "universe" or (head == "agent" and parts[1].endswith(":")):
            inst_lines.append(line)
        elif head == "domain" or (head == "agent" and parts[2:3] == ["argmin:"]):
            profile_lines.append(line)
        elif head == "f":
            inst_lines.append(line)
            profile_lines.append(line)
        elif head in ("mode", "adversary", "faults", "seed", "max_rounds",
                      "schedule", "property"):
            directives.setdefault(head, (lineno, parts[1:]))
        else:
            raise formats.FormatError(f"line {lineno}: unknown directive {head!r}")

    if "mode" not in directives:
        raise formats.FormatError("scenario is missing a 'mode' line")
    lineno, mode_args = directives["mode"]
    if len(mode_args) != 1 or mode_args[0] not in MODES:
        raise formats.FormatError(
            f"line {lineno}: mode must be one of {', '.join(MODES)}"
        )
    s = Scenario(mode=mode_args[0], source_text=text)

    if graph_lines:
        s.graph, s.graph_f = formats.parse_graph("\n".join(graph_lines))
    if inst_lines and any(l.startswith("universe") for l in inst_lines):
        s.instance = formats.parse_instance("\n".join(inst_lines))
    if profile_lines and any(l.startswith("domain") for l in profile_lines):
        s.profile = formats.parse_profile("\n".join(profile_lines))

    if "faults" in directives:
        lineno, args = directives["faults"]
        if args == ["sweep_all"]:
            s.fault_spec = "sweep_all"
        elif args == ["none"] or not args:
            s.fault_spec = frozenset()
        else:
            try:
                s.fault_spec = frozenset(int(a) for a in args)
            except ValueError:
                raise formats.FormatError(
                    f"line {lineno}: faults must be ids, 'none', or 'sweep_all'"
                ) from None
    if "adversary" in directives:
        _, args = directives["adversary"]
        if args == ["catalogue"]:
            s.adversary_spec = "catalogue"
        else:
            s.adversary_spec = (args[0], args[1:])
    if "seed" in directives:
        s.seed = int(directives["seed"][1][0])
    if "max_rounds" in directives:
        s.max_rounds = int(directives["max_rounds"][1][0])
    if "schedule" in directives:
        _, args = directives["schedule"]
        s.schedule_policy = args[0]
        s.schedule_args = tuple(args[1:])
    if "property" in directives:
        _, args = directives["property"]
        s.properties = tuple(args)

    _validate(s)
    return s


def _validate(s: Scenario) -> None:
    needs_graph = {"certify", "run_constrained", "run_unconstrained", "run_async",
                   "optimize", "attack_demo"}
    if s.mode in needs_graph and s.graph is None:
        raise ScenarioError(f"mode {s.mode} needs a graph block")
    if s.mode in ("check_redundancy", "run_constrained", "run_unconstrained",
                  "run_async", "run_centralized") and s.instance is None:
        raise ScenarioError(f"mode {s.mode} needs an instance block")
    if s.mode == "optimize" and s.profile is None:
        raise ScenarioError("mode optimize needs a profile block")
    if s.graph is not None and s.instance is not None:
        if s.graph.n != s.instance.n:
            raise ScenarioError(
                f"graph has {s.graph.n} agents but instance has {s.instance.n}"
            )
        if s.graph_f is not None and s.graph_f != s.instance.f:
            raise ScenarioError("graph header f and instance f disagree")
    if s.graph is not None and s.profile is not None and s.graph.n != s.profile.n:
        raise ScenarioError(
            f"graph has {s.graph.n} agents but profile has {s.profile.n}"
        )
    if isinstance(s.fault_spec, frozenset):
        n = s.graph.n if s.graph else (s.instance.n if s.instance else s.profile.n)
        for i in s.fault_spec:
            if not 0 <= i < n:
                raise ScenarioError(f"fault id {i} out of range")
        if len(s.fault_spec) > s.f:
            raise ScenarioError(
                f"|F|={len(s.fault_spec)} exceeds the fault bound f={s.f}"
            )


def _short_hash(*parts) -> str:
    blob = "\x1f".join(str(p) for p in parts).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _tokens_str(tokens) -> str:
    return "{" + ",".join(sorted(tokens)) + "}"


def _ids_str(ids) -> str:
    return ",".join(str(i) for i in sorted(ids)) if ids else "-"


def _fault_sets(s: Scenario):
    n = s.graph.n if s.graph else (s.instance.n if s.instance else s.profile.n)
    if s.fault_spec == "sweep_all":
        out = []
        for size in range(s.f + 1):
            out.extend(frozenset(c) for c in itertools.combinations(range(n), size))
        return out
    return [frozenset(s.fault_spec)]


def _adversaries(s: Scenario):
    if s.adversary_spec == "catalogue":
        universe = (
            s.instance.universe.values
            if s.instance is not None
            else tuple(str(p) for p in s.profile.domain.points)
        )
        if s.mode == "run_unconstrained":
            return relay_catalogue(universe)
        return default_catalogue(universe)
    name, args = s.adversary_spec
    return [strategy_by_name(name, list(args))]


def _schedule(s: Scenario, seed: int) -> simnet.DeliverySchedule:
    if s.schedule_policy == "synchronous":
        return simnet.DeliverySchedule(seed=seed, policy="synchronous")
    if s.schedule_policy == "random_delay":
        max_delay = int(s.schedule_args[0]) if s.schedule_args else 3
        return simnet.DeliverySchedule(
            seed=seed, policy="random_delay", max_delay=max_delay
        )
    if s.schedule_policy == "starve":
        links = frozenset(
            (int(a.split("-")[0]), int(a.split("-")[1])) for a in s.schedule_args
        )
        return simnet.DeliverySchedule(
            seed=seed, policy="starve", max_delay=3, starved=links
        )
    raise ScenarioError(f"unknown schedule policy {s.schedule_policy!r}")


def _witness_str(witness) -> str:
    from .graph import Partition, ReducedGraph

    if witness is None:
        return "-"
    if isinstance(witness, Partition):
        return (
            f"L={_ids_str(witness.left)};R={_ids_str(witness.right)}"
            f";F={_ids_str(witness.faulty)}"
        )
    if isinstance(witness, frozenset):
        return f"cut={_ids_str(witness)}"
    if isinstance(witness, tuple) and len(witness) >= 3 and isinstance(witness[1], ReducedGraph):
        faulty, rg, comp = witness[0], witness[1], witness[2]
        removed = sorted(rg.base.edges - rg.surviving_edges)
        parts = [
            f"fault={_ids_str(faulty)}",
            "removed_edge=" + (";".join(f"{i}>{j}" for i, j in removed) or "-"),
            f"component={_ids_str(comp)}",
        ]
        if len(witness) > 3:
            parts.append(f"value={witness[3]}")
        return "|".join(parts)
    if isinstance(witness, tuple) and len(witness) == 2:
        y, agents = witness
        return f"value={y if y is not None else '-'};agents={_ids_str(agents)}"
    return str(witness).replace(" ", "")


def _witness_block(witness) -> list[str]:
    """Multi-line witness rendering for the text report: graph-format lines
    plus fault / removed_edge lists."""
    from .graph import Partition, ReducedGraph

    lines = []
    if isinstance(witness, Partition):
        lines.append(f"  L {_ids_str(witness.left)}")
        lines.append(f"  R {_ids_str(witness.right)}")
        lines.append(f"  F {_ids_str(witness.faulty)}")
    elif isinstance(witness, frozenset):
        lines.append(f"  cut {_ids_str(witness)}")
    elif isinstance(witness, tuple) and len(witness) >= 3 and isinstance(witness[1], ReducedGraph):
        faulty, rg, comp = witness[0], witness[1], witness[2]
        for i in sorted(faulty):
            lines.append(f"  fault {i}")
        for i, j in sorted(rg.base.edges - rg.surviving_edges):
            lines.append(f"  removed_edge {i} {j}")
        lines.append(f"  component {_ids_str(comp)}")
        if len(witness) > 3:
            lines.append(f"  value {witness[3]}")
    elif witness is not None:
        lines.append(f"  witness {_witness_str(witness)}")
    return lines


def run_scenario(s: Scenario, jobs: int = 1, budget: int = DEFAULT_BUDGET) -> Report:
    """Dispatch a scenario; sweeps run each (fault set, adversary) sub-run."""
    report = Report()
    if s.mode == "certify":
        report.records.extend(_run_certify(s, budget))
        return report
    if s.mode == "check_redundancy":
        report.records.extend(_run_check(s, budget))
        return report
    if s.mode == "attack_demo":
        report.records.append(_run_attack_demo(s))
        return report

    subruns = [
        (faulty, adv)
        for faulty in _fault_sets(s)
        for adv in _adversaries(s)
    ]
    runner = {
        "run_constrained": _run_constrained_one,
        "run_unconstrained": _run_unconstrained_one,
        "run_async": _run_async_one,
        "run_centralized": _run_centralized_one,
        "optimize": _run_optimize_one,
    }[s.mode]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda fa: runner(s, *fa), subruns))
    else:
        records = [runner(s, faulty, adv) for faulty, adv in subruns]
    records.sort(key=lambda r: r["run"])
    report.records.extend(records)
    report.max_rounds_observed = max(
        (int(r["rounds"]) for r in records if "rounds" in r), default=0
    )
    return report


def _record(s: Scenario, check: str, **fields) -> dict:
    rec = {
        "run": _short_hash(s.source_text, check, *fields.items()),
        "mode": s.mode,
        "check": check,
    }
    rec.update({k: v for k, v in fields.items() if v is not None})
    return rec


def _run_certify(s: Scenario, budget) -> list[dict]:
    g, f = s.graph, s.f
    records = []
    checks = [
        ("condition_a", lambda: conditions.check_condition_a(g, f)),
        ("condition_b", lambda: conditions.check_condition_b(g, f, budget)),
        ("condition_async", lambda: conditions.check_condition_async(g, f)),
        ("connectivity_2f+1", lambda: conditions.check_connectivity_threshold(g, 2 * f + 1)),
    ]
    for name, fn in checks:
        verdict = fn()
        records.append(_record(
            s, name, f=str(f),
            holds="true" if verdict.holds else "false",
            witness=_witness_str(verdict.witness),
            ok="true" if verdict.holds else "false",
        ))
        records[-1]["_witness_obj"] = verdict.witness
    single = conditions.single_source_check(g, f, budget)
    records.append(_record(
        s, "single_source", f=str(f),
        holds="true" if single else "false",
        witness="-",
        ok="true" if single else "false",
    ))
    return records


def _run_check(s: Scenario, budget) -> list[dict]:
    inst = s.instance
    props = s.properties or (("b", "c", "3f", "d") if s.graph else ("b", "c", "3f"))
    checkers = {
        "b": lambda: redundancy.check_property_b(inst),
        "c": lambda: redundancy.check_property_c(inst),
        "3f": lambda: redundancy.check_3f_redundancy(inst),
    }
    records = []
    for prop in props:
        if prop == "d":
            if s.graph is None:
                raise ScenarioError("property d needs a graph")
            verdict = redundancy.check_property_d(inst, s.graph, budget)
        elif prop in checkers:
            verdict = checkers[prop]()
        else:
            raise ScenarioError(f"unknown property {prop!r}")
        records.append(_record(
            s, f"property_{prop}",
            holds="true" if verdict.holds else "false",
            witness=_witness_str(verdict.witness),
            ok="true" if verdict.holds else "false",
        ))
    return records


def _outcome_record(s, check, faulty, adv, outcome, seed=None, schedule=None):
    target = s.instance.universe.tokens_of(
        protocols.non_faulty_intersection(s.instance, faulty)
    )
    outputs = set(map(frozenset, outcome.decided.values()))
    ok = outcome.converged and outputs == {frozenset(target)}
    return _record(
        s, check,
        faults=_ids_str(faulty),
        adversary=adv.name,
        seed=str(seed if seed is not None else s.seed),
        schedule=schedule,
        converged="true" if outcome.converged else "false",
        rounds=str(outcome.rounds_elapsed),
        output=_tokens_str(next(iter(outputs))) if len(outputs) == 1 else "mixed",
        ok="true" if ok else "false",
    )


def _run_constrained_one(s, faulty, adv):
    outcome = protocols.run_constrained(
        s.graph, s.instance, faulty, adv, s.max_rounds
    )
    return _outcome_record(s, "constrained", faulty, adv, outcome)


def _run_unconstrained_one(s, faulty, adv):
    outcome = protocols.run_unconstrained(s.graph, s.instance, faulty, adv)
    return _outcome_record(s, "unconstrained", faulty, adv, outcome)


def _run_async_one(s, faulty, adv):
    schedule = _schedule(s, s.seed)
    outcome = protocols.run_constrained_async(
        s.graph, s.instance, faulty, adv, schedule, s.max_rounds
    )
    return _outcome_record(
        s, "async", faulty, adv, outcome,
        schedule=f"{schedule.policy}:{s.seed}",
    )


def _run_centralized_one(s, faulty, adv):
    inst = s.instance
    reported = {}
    for i in range(inst.n):
        if i in faulty:
            m = adv.send_mask(0, i, -1, inst.local_mask(i), inst)
            reported[i] = inst.universe.tokens_of(m if m is not None else 0)
        else:
            reported[i] = inst.local_set(i)
    result = protocols.run_centralized(inst, reported)
    target = inst.universe.tokens_of(
        protocols.non_faulty_intersection(inst, faulty)
    )
    got_quorum = result is not protocols.NO_QUORUM
    ok = got_quorum and result == target
    return _record(
        s, "centralized",
        faults=_ids_str(faulty),
        adversary=adv.name,
        seed=str(s.seed),
        converged="true" if got_quorum else "false",
        output=_tokens_str(result) if got_quorum else "no_quorum",
        ok="true" if ok else "false",
    )


def _run_optimize_one(s, faulty, adv):
    try:
        out = optbridge.solve_byz_opt(s.graph, s.profile, faulty, adv)
    except optbridge.NonConvergenceError as exc:
        return _record(
            s, "optimize",
            faults=_ids_str(faulty), adversary=adv.name, seed=str(s.seed),
            converged="false", ok="false", error=str(exc).replace(" ", "_"),
        )
    honest = [i for i in range(s.profile.n) if i not in faulty]
    agg = optbridge.aggregate_argmin(s.profile, honest)
    points = set(out.values())
    ok = len(points) == 1 and next(iter(points)) in agg
    return _record(
        s, "optimize",
        faults=_ids_str(faulty), adversary=adv.name, seed=str(s.seed),
        converged="true",
        output=str(next(iter(points))) if len(points) == 1 else "mixed",
        ok="true" if ok else "false",
    )


def _run_attack_demo(s: Scenario) -> dict:
    g, f = s.graph, s.f
    if not conditions.check_condition_a(g, f).holds:
        pair = attacks.condition_a_attack_pair(g, f)
        flavor = "condition_a"
    else:
        pair = attacks.property_d_attack_pair(g, f)
        flavor = "property_d"
    same, (ta, tb) = attacks.verify_pair(pair, s.max_rounds)
    ok = same and ta != tb
    return _record(
        s, f"attack_{flavor}",
        victim=str(pair.victim),
        faults=_ids_str(pair.faulty_a) + "/" + _ids_str(pair.faulty_b),
        indistinguishable="true" if same else "false",
        targets_differ="true" if ta != tb else "false",
        output=_tokens_str(ta) + "/" + _tokens_str(tb),
        ok="true" if ok else "false",
    )


def emit_report(report: Report, fmt: str = "text") -> str:
    """Render a report; `structured` is line-oriented key=value with a stable
    field order for fixture diffing."""
    if fmt == "structured":
        lines = []
        for rec in report.records:
            fields = " ".join(
                f"{k}={rec[k]}" for k in _FIELD_ORDER if k in rec
            )
            lines.append(f"record {fields}")
        lines.append(
            f"summary runs={report.runs} failures={report.failures} "
            f"max_rounds={report.max_rounds_observed}"
        )
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = []
    for rec in report.records:
        status = "ok" if rec.get("ok") == "true" else "FAIL"
        detail = " ".join(
            f"{k}={rec[k]}"
            for k in _FIELD_ORDER
            if k in rec and k not in ("run", "mode", "check", "ok", "witness")
        )
        lines.append(f"[{status}] {rec['mode']}/{rec['check']} {detail}".rstrip())
        if rec.get("_witness_obj") is not None:
            lines.extend(_witness_block(rec["_witness_obj"]))
        elif rec.get("witness") not in (None, "-"):
            lines.append(f"  witness {rec['witness']}")
    lines.append(
        f"{report.runs} runs, {report.failures} failures, "
        f"max rounds {report.max_rounds_observed}"
    )
    return "\n".join(lines) + "\n"


def replay_record(s: Scenario, record: dict):
    """Re-run one sub-run from its report record; returns the fresh record."""
    faults = record.get("faults", "-")
    if faults == "-":
        faulty = frozenset()
    else:
        faulty = frozenset(int(i) for i in faults.split(","))
    advs = {a.name: a for a in _adversaries(s)}
    adv = advs.get(record.get("adversary"), strategy_honest())
    runner = {
        "constrained": _run_constrained_one,
        "unconstrained": _run_unconstrained_one,
        "async": _run_async_one,
        "centralized": _run_centralized_one,
        "optimize": _run_optimize_one,
    }[record["check"]]
    return runner(s, faulty, adv)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="byzset",
        description="Byzantine set intersection: certify graphs, check "
        "redundancy, run protocol and attack scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_certify = sub.add_parser("certify", help="check graph conditions")
    p_certify.add_argument("graph_file")
    p_certify.add_argument("--f", type=int, default=None, dest="fault_bound")
    p_certify.add_argument("--format", choices=("text", "structured"), default="text")

    p_check = sub.add_parser("check", help="check redundancy properties")
    p_check.add_argument("instance_file")
    p_check.add_argument("--property", choices=("b", "c", "3f", "d"), required=True)
    p_check.add_argument("--graph", default=None)
    p_check.add_argument("--format", choices=("text", "structured"), default="text")

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario_file")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--format", choices=("text", "structured"), default="text")

    p_opt = sub.add_parser("optimize", help="solve a cost profile")
    p_opt.add_argument("profile_file")
    p_opt.add_argument("--graph", required=True)
    p_opt.add_argument("--format", choices=("text", "structured"), default="text")

    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 2
    budget = int(os.environ.get("BYZSET_BUDGET", DEFAULT_BUDGET))

    try:
        if args.command == "certify":
            g, file_f = formats.parse_graph(_read(args.graph_file))
            f = args.fault_bound if args.fault_bound is not None else file_f
            if f is None:
                raise ScenarioError("no fault bound: pass --f or put it in the file")
            s = Scenario(mode="certify", graph=g, graph_f=f,
                         source_text=_read(args.graph_file))
            report = run_scenario(s, budget=budget)
        elif args.command == "check":
            inst = formats.parse_instance(_read(args.instance_file))
            g = None
            if args.graph:
                g, _ = formats.parse_graph(_read(args.graph))
            s = Scenario(mode="check_redundancy", graph=g, instance=inst,
                         properties=(args.property,),
                         source_text=_read(args.instance_file))
            _validate(s)
            report = run_scenario(s, budget=budget)
        elif args.command == "run":
            s = parse_scenario(_read(args.scenario_file))
            report = run_scenario(s, jobs=args.jobs, budget=budget)
        else:  # optimize
            profile = formats.parse_profile(_read(args.profile_file))
            g, _ = formats.parse_graph(_read(args.graph))
            s = Scenario(mode="optimize", graph=g, profile=profile,
                         source_text=_read(args.profile_file))
            _validate(s)
            report = run_scenario(s, budget=budget)
    except (formats.FormatError, ScenarioError, FileNotFoundError) as exc:
        print(f"byzset: {exc}", file=sys.stderr)
        return 2

    sys.stdout.write(emit_report(report, args.format))
    return 0 if report.all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
