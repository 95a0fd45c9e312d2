"""Every system from the worked examples, with expected property rows.

Rows are ordered as :data:`parskit.window.PROPERTIES`: local confluence,
confluence, termination, a.s. local convergence, a.s. convergence, a.s.
termination.  ``loop_a`` is 0->1 with a loop on 1, ``coin_b`` adds an exit
from the loop, ``hindley_c`` is the two-sink Hindley system and ``ladder_d`` /
``ladder_dprime`` are the infinite ladders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Any

from . import ars, prob
from .certify import LyapunovCertificate
from .errors import UnknownEntry
from .model import ARS, GeneratedPars, Pars, Rule, system_to_dict
from .transform import CPRIME, C, TransformMapping, mapping_to_dict
from .window import PROPERTIES, window_row

HALF = Fraction(1, 2)
MAX_HERMAN = 12


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    system: Pars | GeneratedPars
    expected: dict[str, bool | None]
    annotations: dict[str, Any] = field(default_factory=dict)
    certificate: LyapunovCertificate | None = None
    mapping: TransformMapping | None = None
    description: str = ""

    @property
    def finite(self) -> bool:
        return isinstance(self.system, Pars)


def _row(*signs: str) -> dict[str, bool | None]:
    lookup = {"+": True, "-": False, "?": None}
    return dict(zip(PROPERTIES, (lookup[s] for s in signs)))


# -- builders -------------------------------------------------------------------

def herman_ring(n: int) -> Pars:
    """Synchronous token ring on ``n`` processes, states written ``[b1...bn]``.

    Each token holder independently keeps its token or passes it to its left
    neighbour with probability 1/2; a kept token meeting an arriving one
    annihilates both.
    """
    if not 1 <= n <= MAX_HERMAN:
        raise ValueError(f"herman_ring supports 1 <= n <= {MAX_HERMAN}")
    states = list(product((0, 1), repeat=n))
    rules = []
    for bits in states:
        holders = [i for i, b in enumerate(bits) if b]
        if not holders:
            continue
        weight = Fraction(1, 2 ** len(holders))
        out: dict[tuple, Fraction] = {}
        for passes in product((False, True), repeat=len(holders)):
            kept = [0] * n
            received = [0] * n
            for i, p in zip(holders, passes):
                if p:
                    received[(i - 1) % n] ^= 1
                else:
                    kept[i] = 1
            nxt = tuple(k ^ r for k, r in zip(kept, received))
            out[nxt] = out.get(nxt, Fraction(0)) + weight
        rules += [Rule(_bits(bits), _bits(t), p) for t, p in out.items()]
    return Pars.build([_bits(b) for b in states], rules)


def _bits(bits) -> str:
    return "[" + "".join(map(str, bits)) + "]"


def herman_pruned() -> Pars:
    """The 3-ring with both outgoing edges of [100] removed, so [100] is a normal form."""
    full = herman_ring(3)
    rules = [r for r in full.rules if r.source != "[100]"]
    return Pars.build(full.states, rules)


def herman_quotient() -> Pars:
    return Pars.build(["odd", "even", "[100]", "[000]"],
                      [("odd", "[100]"), ("even", "[000]")], kind=ARS)


HERMAN_G = {"[100]": "[100]", "[000]": "[000]",
            "[111]": "odd", "[001]": "odd", "[010]": "odd",
            "[011]": "even", "[101]": "even", "[110]": "even"}


def random_walk(N: int) -> Pars:
    """States 0..N plus the normal form ``a``; at N the up-edge is dropped.

    Reflecting at N makes the walk finite and absorbed with probability 1.
    For a lower bound on the infinite walk, explore the generated variant
    instead and treat its frontier as lost mass.
    """
    if N < 1:
        raise ValueError("truncation must be at least 1")
    third = Fraction(1, 3)
    rules = [Rule("0", "a", 1 - third), Rule("0", "1", third)]
    for k in range(1, N):
        rules += [Rule(str(k), str(k - 1), 1 - third), Rule(str(k), str(k + 1), third)]
    rules.append(Rule(str(N), str(N - 1), Fraction(1)))
    return Pars.build([str(k) for k in range(N + 1)] + ["a"], rules)


def _walk_successors(state: str):
    if state == "a":
        return []
    n = int(state)
    down = "a" if n == 0 else str(n - 1)
    return [(str(n + 1), Fraction(1, 3)), (down, Fraction(2, 3))]


def random_walk_generated() -> GeneratedPars:
    claims = {
        "local_confluence": (True, "every element reaches the unique normal form a"),
        "confluence": (True, "every element reaches a, the only normal form"),
        "termination": (False, "0 -> 1 -> 0 -> ... is infinite"),
    }
    return GeneratedPars(("0",), _walk_successors, "random_walk",
                         annotations={"claims": claims})


def random_walk_mapping(N: int) -> TransformMapping:
    target = Pars.build(["number", "a"], [("number", "a")], kind=ARS)
    source = random_walk(N)
    G = {s: ("a" if s == "a" else "number") for s in source.states}
    return TransformMapping(source, target, G, CPRIME)


def ladder(probability_down) -> GeneratedPars:
    """The ladder 0 -> 1 -> 2 -> ... where state k also drops to ``a``.

    ``probability_down(i)`` is the probability of the i-th rung (1-based)
    dropping to ``a``.
    """
    def successors(state: str):
        if state == "a":
            return []
        i = int(state) + 1
        q = Fraction(probability_down(i))
        return [(str(i), 1 - q), ("a", q)]
    return successors


def _ladder_claims():
    return {
        "local_confluence": (True, "the only peak at k is k+1 <- k -> a, joined by k+1 -> a"),
        "confluence": (True, "a is the only normal form and every element reaches it in one step"),
        "termination": (False, "0 -> 1 -> 2 -> ... is an infinite path"),
    }


def ladder_d() -> GeneratedPars:
    # from rung k the chance of ever dropping is at most sum_{i>k} 4^-i = 4^-k / 3
    def absorb_bound(state: str) -> Fraction:
        return Fraction(1) if state == "a" else Fraction(1, 3 * 4 ** int(state))
    return GeneratedPars(("0",), ladder(lambda i: Fraction(1, 4 ** i)), "ladder_d",
                         absorb_bound=absorb_bound,
                         annotations={
                             "claims": _ladder_claims(),
                             "divergence_factors": lambda i: 1 - Fraction(1, 4 ** i),
                             "divergence_tail_bound": lambda N: Fraction(1, 3 * 4 ** N),
                             "divergence_value": "prod_{i>=1} (1 - 4^-i) = (1/4; 1/4)_inf ~ 0.6885",
                         })


def ladder_dprime() -> GeneratedPars:
    return GeneratedPars(("0",), ladder(lambda i: HALF), "ladder_dprime",
                         annotations={"claims": _ladder_claims(),
                                      "reach_a": "1/2 + 1/4 + 1/8 + ... = 1 from every element"})


def loop_exit_system(p=HALF) -> Pars:
    p = Fraction(p)
    return Pars.build(["0", "a"], [("0", "0", p), ("0", "a", 1 - p)])


def loop_exit_mapping(p=HALF) -> TransformMapping:
    target = Pars.build(["0", "a"], [("0", "a")], kind=ARS)
    return TransformMapping(loop_exit_system(p), target, {"0": "0", "a": "a"}, C)


# -- registry ---------------------------------------------------------------------

def _loop_a():
    s = Pars.build(["0", "1"], [("0", "1", 1), ("1", "1", 1)])
    return CorpusEntry("loop_a", s, _row("+", "+", "-", "-", "-", "-"),
                       description="0 -> 1 with a certain loop on 1; no normal form")


def _coin_b():
    s = Pars.build(["0", "1", "a"], [("0", "1", 1), ("1", "1", HALF), ("1", "a", HALF)])
    return CorpusEntry("coin_b", s, _row("+", "+", "-", "+", "+", "+"),
                       description="0 -> 1, then a fair coin decides between looping and a")


def _hindley_c():
    s = Pars.build(["a", "0", "1", "b"], [("0", "a", HALF), ("0", "1", HALF),
                                          ("1", "0", HALF), ("1", "b", HALF)])
    return CorpusEntry("hindley_c", s, _row("+", "-", "-", "-", "-", "+"),
                       annotations={"reach_from_0": {"a": Fraction(2, 3), "b": Fraction(1, 3)}},
                       description="locally confluent, a.s. terminating, not confluent")


def _ladder_d():
    return CorpusEntry("ladder_d", ladder_d(), _row("+", "+", "-", "-", "-", "-"),
                       annotations={"divergence_from_0": 0.6885},
                       description="rung i drops to a with probability 4^-i")


def _ladder_dprime():
    cert = LyapunovCertificate.named("ladder_dprime", 1,
                                     argument="V(k)=4, V(a)=1: 4 - (4/2 + 1/2) = 3/2 >= 1 at every k")
    return CorpusEntry("ladder_dprime", ladder_dprime(), _row("+", "+", "-", "+", "+", "+"),
                       certificate=cert, description="the ladder with every probability 1/2")


def _random_walk():
    cert = LyapunovCertificate.named(
        "random_walk", Fraction(1, 3),
        argument="n+2 - ((n+3)/3 + 2(n+1)/3) = 1/3 for n > 0; 2 - (3/3 + 2/3) = 1/3 at 0")
    return CorpusEntry("random_walk", random_walk_generated(), _row("+", "+", "-", "+", "+", "+"),
                       certificate=cert, mapping=random_walk_mapping(10),
                       annotations={"mapping": "G(n) = number, G(a) = a onto number -> a (Cprime); "
                                               "checked on truncations"},
                       description="up with 1/3, down with 2/3, 0 drops to a")


def _herman3():
    return CorpusEntry("herman3", herman_ring(3), _row("+", "+", "-", "-", "-", "-"),
                       annotations={"known_deltas": {
                           "[011] self-loop": "the process gives 1/4, not 1/2"}},
                       description="Herman's ring with 3 processes; odd states never reach [000]")


def _herman3_pruned():
    cert = LyapunovCertificate.named(
        "herman", HALF,
        argument="two-token states expect 19/2 next; [010] has the smallest margin, 1/2")
    return CorpusEntry("herman3_pruned", herman_pruned(), _row("+", "+", "-", "+", "+", "+"),
                       certificate=cert,
                       mapping=TransformMapping(herman_pruned(), herman_quotient(), HERMAN_G, CPRIME),
                       annotations={"known_deltas": {
                           "V([101])": "the formula gives 13, not 14",
                           "epsilon": "uniform epsilon is 1/2 because [010] has margin 1/2"}},
                       description="the 3-ring with [100] made terminal")


def _herman_quotient():
    return CorpusEntry("herman_quotient", herman_quotient(), _row("+", "+", "+", "?", "?", "?"),
                       description="odd -> [100], even -> [000]; plain ARS")


def _loop_exit_example():
    cert = LyapunovCertificate.named("loop_exit", HALF, argument="2 - (2p + (1-p)) = 1 - p")
    return CorpusEntry("sec4_example", loop_exit_system(), _row("+", "+", "-", "+", "+", "+"),
                       certificate=cert, mapping=loop_exit_mapping(),
                       annotations={"p": HALF},
                       description="0 loops with probability p and exits to a otherwise")


_BUILDERS = {
    "loop_a": _loop_a, "coin_b": _coin_b, "hindley_c": _hindley_c,
    "ladder_d": _ladder_d, "ladder_dprime": _ladder_dprime, "random_walk": _random_walk,
    "herman3": _herman3, "herman3_pruned": _herman3_pruned,
    "herman_quotient": _herman_quotient, "sec4_example": _loop_exit_example,
}

NAMES = tuple(_BUILDERS)
TABLE_ONE = ("loop_a", "coin_b", "hindley_c", "ladder_d", "ladder_dprime")


@lru_cache(maxsize=None)
def builtin(name: str) -> CorpusEntry:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise UnknownEntry(name) from None


def finite_entries() -> list[CorpusEntry]:
    return [builtin(n) for n in NAMES if builtin(n).finite]


# -- property rows ------------------------------------------------------------------

CHECKERS = {
    "local_confluence": ars.check_local_confluence,
    "confluence": ars.check_confluence,
    "termination": ars.check_termination,
    "as_local_convergence": prob.check_as_local_convergence,
    "as_convergence": prob.check_as_convergence,
    "as_termination": prob.check_as_termination,
}


def finite_row(system: Pars, properties=PROPERTIES) -> dict[str, ars.Decision]:
    return {p: CHECKERS[p](system) for p in properties
            if system.probabilistic or not p.startswith("as_")}


def table_row(entry: CorpusEntry, depth: int = 80, n: int = 60) -> dict[str, ars.Verdict]:
    if entry.finite:
        return {p: d.verdict for p, d in finite_row(entry.system).items()}
    return {p: c.verdict for p, c in window_row(entry.system, depth, n, entry.certificate).items()}


def export(entry: CorpusEntry, depth: int | None = None) -> tuple[dict, dict]:
    """The system document (a window for generated entries) plus an annotations sidecar."""
    from .model import explore
    if entry.finite:
        system = entry.system
    else:
        system = explore(entry.system, depth if depth is not None else 10).core
    sidecar: dict[str, Any] = {
        "name": entry.name,
        "description": entry.description,
        "expected": {p: v for p, v in entry.expected.items()},
        "annotations": {k: _plain(v) for k, v in entry.annotations.items() if not callable(v)},
    }
    if not entry.finite:
        sidecar["window_depth"] = depth if depth is not None else 10
    if entry.certificate is not None:
        sidecar["certificate"] = entry.certificate.to_dict()
    if entry.mapping is not None:
        sidecar["mapping"] = mapping_to_dict(entry.mapping, entry.name, "target")
        sidecar["mapping_target"] = system_to_dict(entry.mapping.target)
    return system_to_dict(system), sidecar


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items() if not callable(x)}
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v
