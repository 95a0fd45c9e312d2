"""Exact reaching and divergence probabilities, and the almost-sure checkers.

Two independent routes compute the same quantities:

* :func:`absorption_solve` solves the fixed-point equations
  ``x_s(t) = sum_{s->s'} P(s->s') x_{s'}(t)`` by rational elimination;
* :func:`pn_iterate` pushes path mass forward one reduction at a time,
  giving the step-``n`` distribution over absorbed and still-alive mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, NamedTuple, Sequence

from . import linalg
from .ars import Decision, Verdict, check_confluence, graph, no, refuse, yes
from .errors import (
    FrontierPresent,
    NotAPath,
    NotProbabilistic,
    TailBoundInvalid,
    TargetNotNormalForm,
    TargetUnreachable,
    UnknownState,
)
from .model import ExploredSystem, GeneratedPars, Pars, _split, explore

ZERO = Fraction(0)
ONE = Fraction(1)

SOLVE = "solve"
ITERATE = "iterate"
BRACKET = "bracket"


class Interval(NamedTuple):
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_dict(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi)}


@dataclass(frozen=True)
class ReachReport:
    start: str
    reach: dict[str, Fraction]
    divergence: Fraction | Interval
    method: str = SOLVE

    @property
    def total(self) -> Fraction:
        return sum(self.reach.values(), ZERO)

    def to_dict(self) -> dict:
        div = self.divergence
        return {
            "start": self.start,
            "reach": {t: str(p) for t, p in sorted(self.reach.items())},
            "divergence": div.to_dict() if isinstance(div, Interval) else str(div),
            "method": self.method,
        }


@dataclass(frozen=True)
class PnState:
    n: int
    settled: dict[str, Fraction]
    alive: dict[str, Fraction]
    frontier: frozenset[str] = field(default_factory=frozenset)

    @property
    def settled_mass(self) -> Fraction:
        return sum(self.settled.values(), ZERO)

    @property
    def alive_mass(self) -> Fraction:
        return sum(self.alive.values(), ZERO)

    @property
    def frontier_mass(self) -> Fraction:
        return sum((p for s, p in self.alive.items() if s in self.frontier), ZERO)

    def to_dict(self) -> dict:
        return {"n": self.n,
                "settled": {t: str(p) for t, p in sorted(self.settled.items())},
                "alive": str(self.alive_mass)}


def _require_probabilistic(core: Pars):
    if not core.probabilistic:
        raise NotProbabilistic("probabilities requested on a plain ARS")


def _closed(system) -> Pars:
    core, frontier = _split(system)
    if frontier:
        raise FrontierPresent(frontier)
    _require_probabilistic(core)
    return core


def path_probability(system, path: Sequence[str]) -> Fraction:
    """Product of rule probabilities along ``path``; a single state has probability 1."""
    core, _ = _split(system)
    _require_probabilistic(core)
    if not path:
        raise NotAPath("a path needs at least its start state")
    if path[0] not in core:
        raise UnknownState(path[0])
    prob = ONE
    for u, v in zip(path, path[1:]):
        p = core.probability(u, v) if u in core else None
        if p is None:
            raise NotAPath(f"{u} -> {v} is not a reduction")
        prob *= p
    return prob


def pn_trace(system, start: str, n: int) -> Iterator[PnState]:
    """Yield the step-k distributions for k = 0..n.

    Frontier states of a window keep their mass alive: it is neither
    settled nor propagated.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    core, frontier = _split(system)
    _require_probabilistic(core)
    if start not in core:
        raise UnknownState(start)
    settled: dict[str, Fraction] = {}
    alive: dict[str, Fraction] = {}
    if core.is_normal_form(start) and start not in frontier:
        settled[start] = ONE
    else:
        alive[start] = ONE
    yield PnState(0, dict(settled), dict(alive), frontier)
    for k in range(1, n + 1):
        nxt: dict[str, Fraction] = {}
        for u in sorted(alive):
            mass = alive[u]
            if u in frontier:
                nxt[u] = nxt.get(u, ZERO) + mass
                continue
            for v, p in core.successors(u):
                if core.is_normal_form(v) and v not in frontier:
                    settled[v] = settled.get(v, ZERO) + mass * p
                else:
                    nxt[v] = nxt.get(v, ZERO) + mass * p
        alive = nxt
        yield PnState(k, dict(settled), dict(alive), frontier)


def pn_iterate(system, start: str, n: int) -> PnState:
    state = None
    for state in pn_trace(system, start, n):
        pass
    return state


def _absorb(core: Pars, sinks: frozenset[str]) -> dict[str, dict[str, Fraction]]:
    """Exact probability of first hitting each sink, for every state.

    States that cannot reach any sink have all-zero rows and are left out of
    the linear system; the rest form a nonsingular ``I - Q``.
    """
    g = graph(core)
    sink_mask = 0
    for s in sinks:
        sink_mask |= 1 << g.index[s]
    transient = [s for i, s in enumerate(g.names)
                 if s not in sinks and g.reach[i] & sink_mask]
    col = {s: k for k, s in enumerate(transient)}
    matrix, rhs = [], []
    for s in transient:
        row = {col[s]: ONE}
        b: dict[str, Fraction] = {}
        for t, p in core.successors(s):
            if t in sinks:
                b[t] = b.get(t, ZERO) + p
            elif t in col:
                row[col[t]] = row.get(col[t], ZERO) - p
        matrix.append(row)
        rhs.append(b)
    sol = linalg.solve(matrix, rhs)
    out = {s: {} for s in g.names}
    for s in sinks:
        out[s] = {s: ONE}
    for s, x in zip(transient, sol):
        out[s] = {t: v for t, v in sorted(x.items()) if v}
    return out


@lru_cache(maxsize=64)
def _solve_cached(core: Pars) -> dict[str, ReachReport]:
    sinks = frozenset(s for s in core.states if core.is_normal_form(s))
    hits = _absorb(core, sinks)
    return {s: ReachReport(s, hits[s], ONE - sum(hits[s].values(), ZERO), SOLVE)
            for s in core.states}


def absorption_solve(system) -> dict[str, ReachReport]:
    """Exact ``P(s ->* t)`` and ``P(s -> inf)`` for every state of a finite PARS."""
    return dict(_solve_cached(_closed(system)))


def reach_probability(system, s: str, t: str) -> Fraction:
    core = _closed(system)
    for x in (s, t):
        if x not in core:
            raise UnknownState(x)
    if not core.is_normal_form(t):
        raise TargetNotNormalForm(s, t)
    report = _solve_cached(core)[s]
    if t not in report.reach:
        raise TargetUnreachable(s, t)
    return report.reach[t]


def divergence_bracket(g: GeneratedPars | Pars, start: str, depth: int, n: int) -> Interval:
    """Certified interval for ``P(start -> inf)`` from a finite window.

    ``hi`` is the smaller of the step-``n`` alive mass and one minus the mass
    absorbed inside the window.  ``lo`` assumes everything that reaches the
    frontier is later absorbed, capped by ``g.absorb_bound`` when given.
    """
    if isinstance(g, Pars):
        window = ExploredSystem(g, frozenset(), depth)
        bound = None
    else:
        window = explore(g, depth, roots=(start,))
        bound = g.absorb_bound
    core, frontier = window.core, window.frontier
    _require_probabilistic(core)
    step = pn_iterate(window, start, n)

    nfs = frozenset(s for s in core.states if core.is_normal_form(s) and s not in frontier)
    hits = _absorb(core, nfs | frontier)[start]
    absorbed = sum((p for t, p in hits.items() if t in nfs), ZERO)
    escape = ZERO
    for f in sorted(frontier):
        if f in hits:
            escape += hits[f] * (bound(f) if bound is not None else ONE)
    hi = min(step.alive_mass, ONE - absorbed)
    lo = max(ZERO, ONE - absorbed - escape)
    return Interval(lo, hi)


def single_path_divergence_bounds(factors: Sequence[Fraction], N: int,
                                  tail_bound: Fraction | None = None) -> Interval:
    """Bracket the infinite product of ``factors`` using its first ``N`` terms.

    ``tail_bound`` must dominate the sum of ``1 - p_i`` over ``i > N``; then
    the tail product is at least ``1 - tail_bound``.  Without one the lower
    end is 0.
    """
    head = ONE
    for p in list(factors)[:N]:
        p = Fraction(p)
        if not 0 < p <= 1:
            raise ValueError(f"factor {p} outside (0, 1]")
        head *= p
    if tail_bound is None:
        return Interval(ZERO, head)
    tail_bound = Fraction(tail_bound)
    if tail_bound < 0 or tail_bound >= 1:
        raise TailBoundInvalid(f"tail bound {tail_bound} must lie in [0, 1)")
    return Interval(head * (ONE - tail_bound), head)


# -- almost-sure checkers -------------------------------------------------------

def _sure_nf(report: ReachReport) -> str | None:
    for t, p in report.reach.items():
        if p == 1:
            return t
    return None


def check_as_termination(system) -> Decision:
    """On a finite chain divergence is 0 everywhere iff every state reaches a normal form."""
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("as_termination", system)
    core, _ = _split(system)
    _require_probabilistic(core)
    g = graph(core)
    for i, s in enumerate(g.names):
        if not g.reach[i] & g.nf_mask:
            return no("as_termination", s)
    return yes("as_termination")


def check_as_local_convergence(system) -> Decision:
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("as_local_convergence", system)
    core = _closed(system)
    reports = _solve_cached(core)
    for s in core.states:
        succ = sorted(core.successor_states(s))
        # two-branch peaks first, so a witness shows both sides when it can
        peaks = list(combinations(succ, 2)) + [(x, x) for x in succ]
        for s1, s2 in peaks:
            t1, t2 = _sure_nf(reports[s1]), _sure_nf(reports[s2])
            if t1 is None or t1 != t2:
                return no("as_local_convergence", (s, s1, s2),
                          distributions={s1: reports[s1].reach, s2: reports[s2].reach})
    return yes("as_local_convergence")


def check_as_convergence(system) -> Decision:
    """Decided from the definition over all co-reachable pairs.

    The evidence also records the a.s.-termination and confluence verdicts,
    whose conjunction must agree with the result.
    """
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("as_convergence", system)
    core = _closed(system)
    reports = _solve_cached(core)
    g = graph(core)
    sure = [_sure_nf(reports[s]) for s in g.names]
    conjuncts = {"as_termination": check_as_termination(core).verdict.value,
                 "confluence": check_confluence(core).verdict.value}
    failed = sorted(k for k, v in conjuncts.items() if v != "yes")
    for i, s in enumerate(g.names):
        cone = g.decode(g.reach[i])
        targets = {sure[g.index[x]] for x in cone}
        if len(targets) == 1 and None not in targets:
            continue
        for a, s1 in enumerate(cone):
            t1 = sure[g.index[s1]]
            for s2 in cone[a:]:
                if t1 is None or t1 != sure[g.index[s2]]:
                    return no("as_convergence", (s, s1, s2), conjuncts=conjuncts, failed=failed)
    return yes("as_convergence", conjuncts=conjuncts, failed=failed)


def check_prob_normalizing(system) -> Decision:
    if isinstance(system, ExploredSystem) and system.frontier:
        return refuse("prob_normalizing", system)
    core = _closed(system)
    reports = _solve_cached(core)
    evidence = []
    for s in core.states:
        positive = [(t, p) for t, p in reports[s].reach.items() if p > 0]
        if not positive:
            return no("prob_normalizing", s)
        evidence.append((s, *positive[0]))
    return yes("prob_normalizing", evidence)


__all__ = [
    "Interval", "PnState", "ReachReport", "absorption_solve", "check_as_convergence",
    "check_as_local_convergence", "check_as_termination", "check_prob_normalizing",
    "divergence_bracket", "path_probability", "pn_iterate", "pn_trace",
    "reach_probability", "single_path_divergence_bounds", "Verdict",
]
