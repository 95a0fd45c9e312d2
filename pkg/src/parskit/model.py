"""Representation, validation and bounded exploration of (probabilistic) ARS.

A :class:`Pars` is a finite labelled graph whose edges carry exact
:class:`~fractions.Fraction` probabilities.  Countably infinite systems are
given intensionally as a :class:`GeneratedPars` and only ever analysed
through :func:`explore`, which returns a finite :class:`ExploredSystem`
together with the states it did not expand.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import ParseError, UnknownState, ValidationError

PARS = "pars"
ARS = "ars"

ERROR = "error"
WARNING = "warning"


def parse_probability(value: Any) -> Fraction:
    """Parse ``"1/3"``, ``"0.25"``, ``1`` or a Fraction into an exact rational."""
    if isinstance(value, bool):
        raise ParseError(f"not a probability: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # go through the shortest decimal repr, never the binary expansion
        value = repr(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a probability: {value!r}") from exc
    raise ParseError(f"not a probability: {value!r}")


def format_fraction(p: Fraction) -> str:
    return str(p)


@dataclass(frozen=True, order=True)
class Rule:
    source: str
    target: str
    p: Fraction | None = None

    def __str__(self):
        label = "" if self.p is None else f" [{self.p}]"
        return f"{self.source} -> {self.target}{label}"


@dataclass(frozen=True)
class Issue:
    severity: str
    code: str
    where: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == ERROR]

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}

    def raise_for_errors(self):
        if not self.ok:
            raise ValidationError(self)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {"severity": i.severity, "code": i.code, "where": i.where, "message": i.message}
                for i in self.issues
            ],
        }


@dataclass(frozen=True)
class Pars:
    """A finite (P)ARS.

    ``states`` and ``rules`` are kept sorted so that iteration, witnesses and
    serialisation are deterministic.  Construction does not validate; use
    :func:`validate` or :meth:`Pars.build`.
    """

    states: tuple[str, ...]
    rules: tuple[Rule, ...]
    kind: str = PARS
    roots: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted(self.states)))
        object.__setattr__(self, "rules", tuple(sorted(self.rules, key=lambda r: (r.source, r.target))))
        object.__setattr__(self, "roots", tuple(self.roots))

    @classmethod
    def build(cls, states: Iterable[str], rules: Iterable, kind: str = PARS,
              roots: Iterable[str] = ()) -> "Pars":
        """Build and validate.  ``rules`` may hold Rule objects or (from, to[, p]) tuples."""
        built = []
        for r in rules:
            if isinstance(r, Rule):
                built.append(r)
            elif len(r) == 2:
                built.append(Rule(str(r[0]), str(r[1])))
            else:
                built.append(Rule(str(r[0]), str(r[1]), parse_probability(r[2])))
        system = cls(tuple(str(s) for s in states), tuple(built), kind, tuple(roots))
        validate(system).raise_for_errors()
        return system

    @property
    def probabilistic(self) -> bool:
        return self.kind == PARS

    @cached_property
    def _succ(self) -> dict[str, tuple[tuple[str, Fraction | None], ...]]:
        out: dict[str, list] = {s: [] for s in self.states}
        for r in self.rules:
            out.setdefault(r.source, []).append((r.target, r.p))
        return {s: tuple(v) for s, v in out.items()}

    @cached_property
    def state_set(self) -> frozenset[str]:
        return frozenset(self.states)

    def successors(self, state: str) -> tuple[tuple[str, Fraction | None], ...]:
        """Sorted ``(target, probability)`` pairs of one-step reductions."""
        try:
            return self._succ[state]
        except KeyError:
            raise UnknownState(state) from None

    def successor_states(self, state: str) -> tuple[str, ...]:
        return tuple(t for t, _ in self.successors(state))

    def probability(self, source: str, target: str) -> Fraction | None:
        for t, p in self.successors(source):
            if t == target:
                return p
        return None

    def is_normal_form(self, state: str) -> bool:
        return not self.successors(state)

    def __contains__(self, state) -> bool:
        return state in self.state_set


def normal_forms(system) -> frozenset[str]:
    """States without outgoing rules.  Frontier states of a window are excluded."""
    core, frontier = _split(system)
    return frozenset(s for s in core.states if not core.successors(s) and s not in frontier)


def reducible(system) -> frozenset[str]:
    core, _ = _split(system)
    return frozenset(core.states) - normal_forms(system)


def validate(system: Pars) -> ValidationReport:
    issues: list[Issue] = []
    seen: set[str] = set()
    for s in system.states:
        if not s:
            issues.append(Issue(ERROR, "EmptyStateName", repr(s), "state names must be nonempty"))
        if s in seen:
            issues.append(Issue(ERROR, "DuplicateState", s, f"state {s!r} declared twice"))
        seen.add(s)

    pairs: set[tuple[str, str]] = set()
    sums: dict[str, Fraction] = {}
    for r in system.rules:
        where = f"{r.source}->{r.target}"
        for end in (r.source, r.target):
            if end not in seen:
                issues.append(Issue(ERROR, "UndeclaredState", where, f"endpoint {end!r} is not a declared state"))
        if (r.source, r.target) in pairs:
            issues.append(Issue(ERROR, "DuplicateRule", where, "parallel rules between the same pair"))
        pairs.add((r.source, r.target))
        if system.kind == ARS:
            if r.p is not None:
                issues.append(Issue(WARNING, "IgnoredProbability", where, "plain ARS rule carries a probability"))
            continue
        if r.p is None:
            issues.append(Issue(ERROR, "MissingProbability", where, "probabilistic rule without p"))
            continue
        if r.p == 0:
            issues.append(Issue(ERROR, "ZeroProbabilityEdge", where, "P(s->t) > 0 for every reduction"))
        elif not 0 < r.p <= 1:
            issues.append(Issue(ERROR, "ProbabilityOutOfRange", where, f"p = {r.p} is outside (0, 1]"))
        sums[r.source] = sums.get(r.source, Fraction(0)) + r.p

    if system.kind not in (PARS, ARS):
        issues.append(Issue(ERROR, "UnknownKind", system.kind, "kind must be 'pars' or 'ars'"))
    for s in sorted(sums):
        if sums[s] != 1:
            issues.append(Issue(ERROR, "DistributionSum", s, f"outgoing probabilities sum to {sums[s]}"))
    for s in system.roots:
        if s not in seen:
            issues.append(Issue(ERROR, "UndeclaredState", s, f"root {s!r} is not a declared state"))
    return ValidationReport(tuple(issues))


# -- JSON ---------------------------------------------------------------------

def system_to_dict(system: Pars) -> dict:
    doc: dict[str, Any] = {"kind": system.kind, "states": list(system.states), "rules": []}
    for r in system.rules:
        rule = {"from": r.source, "to": r.target}
        if r.p is not None:
            rule["p"] = format_fraction(r.p)
        doc["rules"].append(rule)
    if system.roots:
        doc["roots"] = list(system.roots)
    return doc


def serialize(system: Pars) -> str:
    return json.dumps(system_to_dict(system), indent=2) + "\n"


def system_from_dict(doc: Mapping) -> Pars:
    if not isinstance(doc, Mapping):
        raise ParseError("system document must be a JSON object")
    kind = doc.get("kind", PARS)
    states = doc.get("states")
    rules = doc.get("rules", [])
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise ParseError("'states' must be a list of strings")
    if not isinstance(rules, list):
        raise ParseError("'rules' must be a list")
    built = []
    for i, r in enumerate(rules):
        if not isinstance(r, Mapping) or "from" not in r or "to" not in r:
            raise ParseError(f"rule #{i} needs 'from' and 'to'")
        p = r.get("p")
        built.append(Rule(str(r["from"]), str(r["to"]), None if p is None else parse_probability(p)))
    roots = doc.get("roots", [])
    if not isinstance(roots, list):
        raise ParseError("'roots' must be a list")
    return Pars(tuple(states), tuple(built), kind, tuple(roots))


def load_system(document: str | bytes | Mapping) -> Pars:
    """Parse a JSON system document and validate it.

    Raises :class:`ParseError` for malformed input and
    :class:`ValidationError` when the system violates a PARS invariant.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    system = system_from_dict(document)
    validate(system).raise_for_errors()
    return system


# -- infinite systems -----------------------------------------------------------

Successors = Callable[[str], Sequence[tuple[str, Fraction]]]


@dataclass(frozen=True)
class GeneratedPars:
    """A countable PARS given by a deterministic successor function.

    ``absorb_bound`` optionally maps a state to an upper bound on the
    probability of ever reaching a normal form from it; it lets
    :func:`parskit.prob.divergence_bracket` produce a nontrivial lower bound.
    ``annotations`` carries free-form analytic facts (see :mod:`parskit.corpus`).
    """

    roots: tuple[str, ...]
    successor_fn: Successors
    name: str = "generated"
    absorb_bound: Callable[[str], Fraction] | None = None
    annotations: Mapping[str, Any] = field(default_factory=dict)

    def successors(self, state: str) -> tuple[tuple[str, Fraction], ...]:
        return tuple(sorted((str(t), Fraction(p)) for t, p in self.successor_fn(state)))


@dataclass(frozen=True)
class ExploredSystem:
    """A finite window onto a generated system.

    ``core`` holds every state within ``depth`` steps of the roots; frontier
    states are in ``core`` without outgoing rules but are *not* normal forms.
    """

    core: Pars
    frontier: frozenset[str]
    depth: int

    @property
    def closed(self) -> bool:
        return not self.frontier

    @property
    def states(self):
        return self.core.states

    def successors(self, state):
        return self.core.successors(state)


def _split(system) -> tuple[Pars, frozenset[str]]:
    if isinstance(system, ExploredSystem):
        return system.core, system.frontier
    return system, frozenset()


def explore(g: GeneratedPars, depth: int, roots: Iterable[str] | None = None) -> ExploredSystem:
    """Breadth-first expansion of ``g`` up to ``depth`` steps from the roots."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    roots = tuple(g.roots if roots is None else roots)
    dist = {r: 0 for r in roots}
    queue = deque(sorted(set(roots)))
    rules: list[Rule] = []
    frontier = set()
    while queue:
        s = queue.popleft()
        succ = g.successors(s)
        _check_distribution(s, succ)
        if not succ:
            continue
        if dist[s] >= depth:
            frontier.add(s)
            continue
        for t, p in succ:
            rules.append(Rule(s, t, p))
            if t not in dist:
                dist[t] = dist[s] + 1
                queue.append(t)
    core = Pars(tuple(dist), tuple(rules), PARS, roots)
    return ExploredSystem(core, frozenset(frontier), depth)


def _check_distribution(state, succ):
    issues = []
    targets = [t for t, _ in succ]
    if len(set(targets)) != len(targets):
        issues.append(Issue(ERROR, "DuplicateRule", state, "successor listed twice"))
    for t, p in succ:
        if p <= 0:
            issues.append(Issue(ERROR, "ZeroProbabilityEdge", f"{state}->{t}", "P(s->t) > 0 for every reduction"))
        elif p > 1:
            issues.append(Issue(ERROR, "ProbabilityOutOfRange", f"{state}->{t}", f"p = {p}"))
    if succ and sum(p for _, p in succ) != 1:
        issues.append(Issue(ERROR, "DistributionSum", state, "successor probabilities do not sum to 1"))
    if issues:
        raise ValidationError(ValidationReport(tuple(issues)))
