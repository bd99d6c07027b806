"""Line-oriented text formats for graphs, instances, and cost profiles.

One self-describing whitespace-separated format family; `#` starts a comment.
Everything round-trips and diffs cleanly, which is what the fixtures lean on.

    graph:     n 5 f 1          instance:  universe a b c     profile: domain 0..4
               edge 0 1                    f 1                         f 1
               ...                         agent 0: a c                agent 0 argmin: 1 2
"""

from __future__ import annotations

from .graph import CommGraph, build_graph
from .optbridge import CostProfile, build_profile
from .redundancy import SetInstance, Universe


class FormatError(ValueError):
    """Parse failure; the message carries the 1-based line number."""


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_graph(text: str) -> tuple[CommGraph, int]:
    """Parse `n <count> f <bound>` plus `edge <src> <dst>` lines."""
    n = f = None
    edges = []
    for lineno, parts in _content_lines(text):
        if parts[0] == "n":
            if len(parts) != 4 or parts[2] != "f":
                raise FormatError(f"line {lineno}: expected 'n <count> f <bound>'")
            try:
                n, f = int(parts[1]), int(parts[3])
            except ValueError:
                raise FormatError(f"line {lineno}: counts must be integers") from None
        elif parts[0] == "edge":
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'edge <src> <dst>'")
            try:
                edges.append((int(parts[1]), int(parts[2])))
            except ValueError:
                raise FormatError(f"line {lineno}: endpoints must be integers") from None
        else:
            raise FormatError(f"line {lineno}: unknown graph directive {parts[0]!r}")
    if n is None:
        raise FormatError("missing 'n <count> f <bound>' header line")
    try:
        return build_graph(n, edges), f
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_graph(g: CommGraph, f: int) -> str:
    lines = [f"n {g.n} f {f}"]
    lines.extend(f"edge {i} {j}" for i, j in sorted(g.edges))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> SetInstance:
    """Parse `universe ...`, `f <bound>`, and `agent <id>: ...` lines."""
    universe = None
    f = None
    agents: dict[int, list[str]] = {}
    for lineno, parts in _content_lines(text):
        if parts[0] == "universe":
            if len(parts) < 2:
                raise FormatError(f"line {lineno}: universe needs at least one token")
            universe = Universe(tuple(parts[1:]))
        elif parts[0] == "f":
            f = int(parts[1])
        elif parts[0] == "agent":
            if len(parts) < 2 or not parts[1].endswith(":"):
                raise FormatError(f"line {lineno}: expected 'agent <id>: tokens...'")
            try:
                agent = int(parts[1][:-1])
            except ValueError:
                raise FormatError(f"line {lineno}: bad agent id {parts[1]!r}") from None
            if agent in agents:
                raise FormatError(f"line {lineno}: duplicate agent {agent}")
            agents[agent] = parts[2:]
        else:
            raise FormatError(f"line {lineno}: unknown instance directive {parts[0]!r}")
    if universe is None or f is None or not agents:
        raise FormatError("instance needs universe, f, and agent lines")
    if sorted(agents) != list(range(len(agents))):
        raise FormatError("agent ids must be dense 0..n-1")
    try:
        return SetInstance.from_sets(universe, agents, f)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_instance(inst: SetInstance) -> str:
    lines = ["universe " + " ".join(inst.universe.values), f"f {inst.f}"]
    for i in range(inst.n):
        tokens = sorted(inst.local_set(i), key=inst.universe.index.__getitem__)
        lines.append(f"agent {i}: " + " ".join(tokens))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def parse_profile(text: str) -> CostProfile:
    """Parse `domain 0..K`, `f <bound>`, and `agent <id> argmin: ...` lines."""
    domain = None
    f = None
    argmins: dict[int, list[int]] = {}
    for lineno, parts in _content_lines(text):
        if parts[0] == "domain":
            if len(parts) != 2 or ".." not in parts[1]:
                raise FormatError(f"line {lineno}: expected 'domain <lo>..<hi>'")
            lo, hi = parts[1].split("..", 1)
            try:
                domain = tuple(range(int(lo), int(hi) + 1))
            except ValueError:
                raise FormatError(f"line {lineno}: bad domain bounds") from None
        elif parts[0] == "f":
            f = int(parts[1])
        elif parts[0] == "agent":
            if len(parts) < 4 or parts[2] != "argmin:":
                raise FormatError(
                    f"line {lineno}: expected 'agent <id> argmin: points...'"
                )
            try:
                agent = int(parts[1])
                argmins[agent] = [int(x) for x in parts[3:]]
            except ValueError:
                raise FormatError(f"line {lineno}: points must be integers") from None
        else:
            raise FormatError(f"line {lineno}: unknown profile directive {parts[0]!r}")
    if domain is None or f is None or not argmins:
        raise FormatError("profile needs domain, f, and agent argmin lines")
    if sorted(argmins) != list(range(len(argmins))):
        raise FormatError("agent ids must be dense 0..n-1")
    try:
        return build_profile(domain, argmins, f)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_profile(p: CostProfile) -> str:
    lines = [f"domain {p.domain.points[0]}..{p.domain.points[-1]}", f"f {p.f}"]
    for i, c in enumerate(p.costs):
        pts = " ".join(str(pt) for pt in sorted(c.argmin_set))
        lines.append(f"agent {i} argmin: {pts}")
    return "\n".join(lines) + "\n"
