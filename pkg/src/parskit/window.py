"""Property verdicts for infinite systems, seen through finite windows.

A window can refute a classical property outright (a cycle refutes
termination; a peak whose two cones are fully materialised and disjoint
refutes confluence) but it cannot establish one.  Positive verdicts come
from annotated claims, which the window then tries to falsify.  On the
probabilistic side a positive divergence lower bound refutes almost-sure
termination and a Lyapunov certificate supports it; the remaining two
properties follow from the implications between the six properties.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ars import Verdict, find_cycle, graph
from .certify import LyapunovCertificate, check_lyapunov
from .errors import ParsError
from .model import ExploredSystem, GeneratedPars, explore
from .prob import divergence_bracket

PROPERTIES = ("local_confluence", "confluence", "termination",
              "as_local_convergence", "as_convergence", "as_termination")


class AnnotationRefuted(ParsError):
    pass


@dataclass(frozen=True)
class Cell:
    verdict: Verdict
    basis: str

    def to_dict(self):
        return {"verdict": self.verdict.value, "basis": self.basis}


def _masks(ex: ExploredSystem):
    g = graph(ex.core)
    fmask = 0
    for f in ex.frontier:
        fmask |= 1 << g.index[f]
    return g, fmask


def window_peaks(ex: ExploredSystem, multi_step: bool) -> tuple[int, list, list]:
    """Count joinable peaks; collect certain refutations and open cases."""
    g, fmask = _masks(ex)
    joined, refuted, open_ = 0, [], []
    for i, s in enumerate(g.names):
        if fmask >> i & 1:
            continue
        if multi_step:
            members = [g.index[x] for x in g.decode(g.reach[i])]
        else:
            members = sorted(set(g.succ[i]))
        for a in range(len(members)):
            for b in range(a, len(members)):
                u, v = members[a], members[b]
                if g.reach[u] & g.reach[v]:
                    joined += 1
                elif (g.reach[u] | g.reach[v]) & fmask:
                    open_.append((s, g.names[u], g.names[v]))
                else:
                    refuted.append((s, g.names[u], g.names[v]))
    return joined, refuted, open_


def _classical(prop, ex, claims, multi_step):
    claim = claims.get(prop)
    joined, refuted, open_ = window_peaks(ex, multi_step)
    if refuted:
        if claim and claim[0]:
            raise AnnotationRefuted(f"{prop} claimed but window refutes it at {refuted[0]}")
        return Cell(Verdict.NO, f"window: peak {refuted[0]} has disjoint, fully explored cones")
    if claim is None:
        return Cell(Verdict.UNKNOWN, f"window: {joined} peaks joinable, {len(open_)} open")
    verdict = Verdict.YES if claim[0] else Verdict.NO
    return Cell(verdict, f"annotation ({claim[1]}); window: {joined} peaks joinable, "
                         f"{len(open_)} reach the frontier")


def window_row(g: GeneratedPars, depth: int, n: int,
               certificate: LyapunovCertificate | None = None) -> dict[str, Cell]:
    claims = g.annotations.get("claims", {})
    ex = explore(g, depth)
    row: dict[str, Cell] = {}

    row["local_confluence"] = _classical("local_confluence", ex, claims, multi_step=False)
    row["confluence"] = _classical("confluence", ex, claims, multi_step=True)

    cycle = find_cycle(ex.core)
    claim = claims.get("termination")
    if cycle is not None:
        if claim and claim[0]:
            raise AnnotationRefuted(f"termination claimed but window has cycle {cycle}")
        row["termination"] = Cell(Verdict.NO, f"window: cycle {' -> '.join(cycle)}")
    elif claim is not None:
        row["termination"] = Cell(Verdict.YES if claim[0] else Verdict.NO,
                                  f"annotation ({claim[1]}); window frontier nonempty at depth {depth}"
                                  if ex.frontier else f"annotation ({claim[1]})")
    else:
        row["termination"] = Cell(Verdict.UNKNOWN, "no cycle within window")

    as_term = Cell(Verdict.UNKNOWN, "no bracket or certificate decides it")
    for root in g.roots:
        bracket = divergence_bracket(g, root, depth, n)
        if bracket.lo > 0:
            as_term = Cell(Verdict.NO, f"P({root} -> inf) >= {float(bracket.lo):.6f} "
                                       f"(bracket [{float(bracket.lo):.6f}, {float(bracket.hi):.6f}])")
            break
    if as_term.verdict is Verdict.UNKNOWN and certificate is not None:
        margins = check_lyapunov(ex, certificate)
        if margins.holds:
            basis = f"Lyapunov certificate, eps={certificate.epsilon}, {margins.verdict}"
            if certificate.argument:
                basis += f"; argument: {certificate.argument}"
            as_term = Cell(Verdict.YES, basis)
        else:
            as_term = Cell(Verdict.UNKNOWN, f"certificate fails at {margins.violations[0]}")
    row["as_termination"] = as_term

    if as_term.verdict is Verdict.NO:
        row["as_convergence"] = Cell(Verdict.NO, "a.s. convergence implies a.s. termination")
        row["as_local_convergence"] = Cell(Verdict.NO, "local a.s. convergence implies a.s. termination")
    elif as_term.verdict is Verdict.YES and row["confluence"].verdict is Verdict.YES:
        row["as_convergence"] = Cell(Verdict.YES, "a.s. termination and confluence")
        row["as_local_convergence"] = Cell(Verdict.YES, "implied by a.s. convergence")
    else:
        row["as_convergence"] = Cell(Verdict.UNKNOWN, "premises undecided")
        row["as_local_convergence"] = Cell(Verdict.UNKNOWN, "premises undecided")
    return {p: row[p] for p in PROPERTIES}
