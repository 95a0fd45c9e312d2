"""Classical rewriting properties of finite systems, decided with witnesses.

Reachability is materialised once as integer bitsets indexed by the sorted
state order, so the lowest set bit of a mask is the lexicographically
smallest state.  That makes "first witness found" and "smallest witness"
the same thing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any

from .model import ExploredSystem, Pars, _split, normal_forms


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Decision:
    property: str
    verdict: Verdict
    witness: Any = None
    evidence: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.YES

    def to_dict(self) -> dict:
        return {"property": self.property, "verdict": self.verdict.value,
                "witness": _jsonable(self.witness),
                **({"evidence": _jsonable(self.evidence)} if self.evidence else {})}


def _jsonable(x):
    from fractions import Fraction
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    return x


def yes(prop, witness=None, **evidence):
    return Decision(prop, Verdict.YES, witness, evidence)


def no(prop, witness, **evidence):
    return Decision(prop, Verdict.NO, witness, evidence)


def refuse(prop, system: ExploredSystem) -> Decision:
    return Decision(prop, Verdict.UNKNOWN, {"frontier": sorted(system.frontier)},
                    {"reason": "finite window with unexpanded frontier"})


class Graph:
    """Index and reachability bitsets of a finite system."""

    def __init__(self, system: Pars):
        self.system = system
        self.names = system.states
        self.index = {s: i for i, s in enumerate(self.names)}
        self.succ = [[self.index[t] for t, _ in system.successors(s)] for s in self.names]
        self.nf_mask = 0
        for i, out in enumerate(self.succ):
            if not out:
                self.nf_mask |= 1 << i
        self.reach = [self._cone(i) for i in range(len(self.names))]

    def _cone(self, i: int) -> int:
        mask = 1 << i
        stack = [i]
        while stack:
            u = stack.pop()
            for v in self.succ[u]:
                if not mask >> v & 1:
                    mask |= 1 << v
                    stack.append(v)
        return mask

    def decode(self, mask: int) -> list[str]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.names[low.bit_length() - 1])
            mask ^= low
        return out

    def lowest(self, mask: int) -> str:
        return self.names[(mask & -mask).bit_length() - 1]


@lru_cache(maxsize=64)
def graph(system: Pars) -> Graph:
    return Graph(system)


def star_closure(system) -> dict[str, frozenset[str]]:
    """Map each state to the set of states it reaches in zero or more steps."""
    core, _ = _split(system)
    g = graph(core)
    return {s: frozenset(g.decode(g.reach[i])) for i, s in enumerate(g.names)}


def nf_map(system) -> dict[str, frozenset[str]]:
    core, _ = _split(system)
    g = graph(core)
    nf = g.nf_mask
    if isinstance(system, ExploredSystem):
        for f in system.frontier:
            nf &= ~(1 << g.index[f])
    return {s: frozenset(g.decode(g.reach[i] & nf)) for i, s in enumerate(g.names)}


def find_cycle(system: Pars) -> list[str] | None:
    """Smallest state lying on a cycle, with a shortest cycle through it."""
    g = graph(system)
    for i, name in enumerate(g.names):
        # i is on a cycle iff some successor reaches back to i
        if not any(g.reach[v] >> i & 1 for v in g.succ[i]):
            continue
        parent = {}
        queue = deque()
        for v in g.succ[i]:
            if v not in parent:
                parent[v] = i
                queue.append(v)
        while queue:
            u = queue.popleft()
            if u == i:
                break
            for v in g.succ[u]:
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        path = [i]
        u = parent[i]
        while u != i:
            path.append(u)
            u = parent[u]
        path.append(i)
        path.reverse()
        return [g.names[k] for k in path]
    return None


def check_termination(system) -> Decision:
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("termination", system)
    core, _ = _split(system)
    cycle = find_cycle(core)
    if cycle is None:
        return yes("termination")
    return no("termination", cycle)


def check_normalizing(system) -> Decision:
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("normalizing", system)
    core, _ = _split(system)
    g = graph(core)
    for i, s in enumerate(g.names):
        if not g.reach[i] & g.nf_mask:
            return no("normalizing", s)
    return yes("normalizing")


def _peaks(g: Graph, i: int):
    out = sorted(set(g.succ[i]))
    for a in range(len(out)):
        for b in range(a, len(out)):
            yield out[a], out[b]


def check_local_confluence(system) -> Decision:
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("local_confluence", system)
    core, _ = _split(system)
    g = graph(core)
    for i, s in enumerate(g.names):
        for u, v in _peaks(g, i):
            if not g.reach[u] & g.reach[v]:
                return no("local_confluence", (s, g.names[u], g.names[v]))
    return yes("local_confluence")


def _unjoinable(g: Graph) -> list[int]:
    """For each state u, the mask of states whose cone is disjoint from u's."""
    n = len(g.names)
    bad = [0] * n
    for u in range(n):
        ru = g.reach[u]
        m = 0
        for v in range(n):
            if not ru & g.reach[v]:
                m |= 1 << v
        bad[u] = m
    return bad


def check_confluence(system) -> Decision:
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("confluence", system)
    core, _ = _split(system)
    g = graph(core)
    bad = _unjoinable(g)
    for i, s in enumerate(g.names):
        cone = g.reach[i]
        rest = cone
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            rest ^= low
            hit = cone & bad[u]
            if hit:
                return no("confluence", (s, g.names[u], g.lowest(hit)))
    return yes("confluence")


def check_unique_nf(system) -> Decision:
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("unique_nf", system)
    for s, nfs in sorted(nf_map(system).items()):
        if len(nfs) != 1:
            return no("unique_nf", s, normal_forms=sorted(nfs))
    return yes("unique_nf")


def convertibility_classes(system) -> list[frozenset[str]]:
    """Weakly connected components, ordered by their smallest member."""
    core, _ = _split(system)
    adj: dict[str, set[str]] = {s: set() for s in core.states}
    for r in core.rules:
        adj[r.source].add(r.target)
        adj[r.target].add(r.source)
    seen: set[str] = set()
    classes = []
    for s in core.states:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        classes.append(frozenset(comp))
    return classes


def class_index(system) -> dict[str, int]:
    return {s: k for k, cls in enumerate(convertibility_classes(system)) for s in cls}


__all__ = [
    "Decision", "Verdict", "check_confluence", "check_local_confluence",
    "check_normalizing", "check_termination", "check_unique_nf",
    "convertibility_classes", "class_index", "find_cycle", "nf_map",
    "normal_forms", "star_closure",
]
