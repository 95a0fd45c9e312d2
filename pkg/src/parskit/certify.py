"""Lyapunov ranking certificates for almost-sure termination.

A certificate pairs a nonnegative valuation ``V`` with a uniform margin
``epsilon``; it holds when every checked reducible state satisfies
``V(s) - sum_{s->s'} P(s->s') V(s') >= epsilon``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .errors import (
    EmptyReport,
    MissingValuation,
    NegativeValuation,
    NonPositiveEpsilon,
    NotProbabilistic,
    ParseError,
)
from .model import _split, parse_probability

FULL = "full"


def _natural(state: str) -> int | None:
    return int(state) if state.isdigit() else None


def _random_walk(state: str) -> Fraction:
    n = _natural(state)
    if n is not None:
        return Fraction(n + 2)
    if state == "a":
        return Fraction(1)
    raise MissingValuation(state)


def _ladder_dprime(state: str) -> Fraction:
    if _natural(state) is not None:
        return Fraction(4)
    if state == "a":
        return Fraction(1)
    raise MissingValuation(state)


def herman_valuation(state: str) -> Fraction:
    """Token count weighted by 2**(n-1), plus token positions as a binary number."""
    bits = state.strip("[]")
    if not bits or set(bits) - {"0", "1"}:
        raise MissingValuation(state)
    n = len(bits)
    b = [int(c) for c in bits]
    return Fraction(2 ** (n - 1) * sum(b) + sum(bi << i for i, bi in enumerate(b)))


def _loop_exit(state: str) -> Fraction:
    try:
        return {"0": Fraction(2), "a": Fraction(1)}[state]
    except KeyError:
        raise MissingValuation(state) from None


BUILTINS: dict[str, Callable[[str], Fraction]] = {
    "random_walk": _random_walk,
    "ladder_dprime": _ladder_dprime,
    "herman": herman_valuation,
    "loop_exit": _loop_exit,
}


@dataclass(frozen=True)
class LyapunovCertificate:
    valuation: Mapping[str, Fraction] | Callable[[str], Fraction]
    epsilon: Fraction
    builtin: str | None = None
    argument: str = ""

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise NonPositiveEpsilon(f"epsilon must be positive, got {self.epsilon}")

    @classmethod
    def named(cls, name: str, epsilon, argument: str = "") -> "LyapunovCertificate":
        try:
            fn = BUILTINS[name]
        except KeyError:
            raise ParseError(f"unknown builtin valuation {name!r}") from None
        return cls(fn, Fraction(epsilon), name, argument)

    def value(self, state: str) -> Fraction:
        if callable(self.valuation):
            v = self.valuation(state)
        else:
            try:
                v = self.valuation[state]
            except KeyError:
                raise MissingValuation(state) from None
        v = Fraction(v)
        if v < 0:
            raise NegativeValuation(f"V({state}) = {v} is negative")
        return v

    def scaled(self, c) -> "LyapunovCertificate":
        c = Fraction(c)
        return LyapunovCertificate(lambda s: c * self.value(s), c * self.epsilon)

    def to_dict(self) -> dict:
        if self.builtin:
            val = {"builtin": self.builtin}
        elif callable(self.valuation):
            raise ValueError("callable valuations cannot be serialised")
        else:
            val = {s: str(v) for s, v in sorted(self.valuation.items())}
        return {"valuation": val, "epsilon": str(self.epsilon)}


def load_certificate(document: str | bytes | Mapping) -> LyapunovCertificate:
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    if not isinstance(document, Mapping) or "valuation" not in document or "epsilon" not in document:
        raise ParseError("certificate needs 'valuation' and 'epsilon'")
    eps = parse_probability(document["epsilon"])
    val = document["valuation"]
    if isinstance(val, Mapping) and "builtin" in val:
        return LyapunovCertificate.named(val["builtin"], eps)
    if not isinstance(val, Mapping):
        raise ParseError("'valuation' must be an object")
    return LyapunovCertificate({str(s): parse_probability(v) for s, v in val.items()}, eps)


@dataclass(frozen=True)
class MarginReport:
    margins: dict[str, Fraction]
    epsilon: Fraction
    coverage: str
    violations: tuple[str, ...] = field(default=())

    @property
    def holds(self) -> bool:
        return not self.violations

    @property
    def states_checked(self) -> int:
        return len(self.margins)

    @property
    def verdict(self) -> str:
        if self.violations:
            return "no"
        return "yes" if self.coverage == FULL else f"evidence({self.coverage})"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "epsilon": str(self.epsilon),
               "coverage": self.coverage, "states_checked": self.states_checked,
               "violations": list(self.violations)}
        if self.margins:
            s, m = min_margin(self)
            out["min_margin"] = {"state": s, "margin": str(m)}
        return out


def check_lyapunov(system, cert: LyapunovCertificate) -> MarginReport:
    """Exact margins at every reducible, non-frontier state of ``system``."""
    core, frontier = _split(system)
    if not core.probabilistic:
        raise NotProbabilistic("Lyapunov certificates need a probabilistic system")
    margins: dict[str, Fraction] = {}
    violations = []
    for s in core.states:
        succ = core.successors(s)
        if not succ or s in frontier:
            continue
        expected = sum((p * cert.value(t) for t, p in succ), Fraction(0))
        m = cert.value(s) - expected
        margins[s] = m
        if m < cert.epsilon:
            violations.append(s)
    coverage = FULL if not frontier else f"depth {system.depth}"
    return MarginReport(margins, cert.epsilon, coverage, tuple(violations))


def min_margin(report: MarginReport) -> tuple[str, Fraction]:
    if not report.margins:
        raise EmptyReport("no reducible states were checked")
    low = min(report.margins.values())
    state = min(s for s, m in report.margins.items() if m == low)
    return state, low
