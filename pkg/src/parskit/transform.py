"""Transfer of (non-)confluence along a state mapping between two systems.

Mode ``C`` checks the five sufficient conditions under which confluence of
the target carries over to the source.  Mode ``Cprime`` checks the stronger
conditions under which the source is confluent exactly when the target is.
Combined with almost-sure termination of the source either mode yields an
almost-sure convergence verdict.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .ars import (
    Decision,
    Verdict,
    check_confluence,
    check_normalizing,
    class_index,
    convertibility_classes,
)
from .errors import FrontierPresent, ParseError, PartialMapping
from .model import ExploredSystem, Pars, normal_forms

C = "C"
CPRIME = "Cprime"


class Conclusion(str, Enum):
    SOURCE_CONFLUENT = "source_confluent"
    SOURCE_NOT_CONFLUENT = "source_not_confluent"
    SOURCE_AS_CONVERGENT = "source_as_convergent"
    SOURCE_NOT_AS_CONVERGENT = "source_not_as_convergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TransformMapping:
    source: Pars
    target: Pars
    G: Mapping[str, str]
    mode: str = C


@dataclass(frozen=True)
class Condition:
    verdict: Verdict
    witness: object = None

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.YES


@dataclass(frozen=True)
class ConditionReport:
    mode: str
    conditions: dict[str, Condition]
    target_confluence: Decision

    @property
    def structural_ok(self) -> bool:
        """All conditions other than confluence of the target."""
        return all(c.holds for k, c in self.conditions.items() if k != "C1")

    @property
    def failed(self) -> list[str]:
        return [k for k, c in self.conditions.items() if not c.holds]

    def to_dict(self) -> dict:
        from .ars import _jsonable
        return {"mode": self.mode,
                "conditions": {k: {"verdict": c.verdict.value, "witness": _jsonable(c.witness)}
                               for k, c in self.conditions.items()},
                "target_confluent": self.target_confluence.verdict.value}


def _ok(witness=None):
    return Condition(Verdict.YES, witness)


def _bad(witness):
    return Condition(Verdict.NO, witness)


def _unwrap(system) -> Pars:
    if isinstance(system, ExploredSystem):
        if system.frontier:
            raise FrontierPresent(system.frontier)
        return system.core
    return system


def _decision(d: Decision) -> Condition:
    return Condition(d.verdict, d.witness)


def _edges_preserved(R: Pars, G, target_class) -> Condition:
    for r in R.rules:
        if target_class[G[r.source]] != target_class[G[r.target]]:
            return _bad((r.source, r.target))
    return _ok()


def _nf_to_nf(nf_src, nf_tgt, G) -> Condition:
    for t in sorted(nf_src):
        if G[t] not in nf_tgt:
            return _bad(t)
    return _ok()


def _injective_on_nf(nf_src, G) -> Condition:
    seen: dict[str, str] = {}
    for t in sorted(nf_src):
        if G[t] in seen:
            return _bad((seen[G[t]], t))
        seen[G[t]] = t
    return _ok()


def check_conditions(mapping: TransformMapping) -> ConditionReport:
    R = _unwrap(mapping.source)
    Rp = _unwrap(mapping.target)
    G = dict(mapping.G)
    missing = [s for s in R.states if s not in G]
    if missing:
        raise PartialMapping(missing)
    bad_image = sorted({G[s] for s in R.states} - set(Rp.states))
    if bad_image:
        raise PartialMapping([f"{s}->{G[s]}" for s in R.states if G[s] in bad_image])

    nf_src, nf_tgt = normal_forms(R), normal_forms(Rp)
    tgt_class = class_index(Rp)
    target_conf = check_confluence(Rp)
    conds: dict[str, Condition] = {}

    if mapping.mode == C:
        conds["C1"] = _decision(target_conf)
        conds["C2"] = _decision(check_normalizing(R))
        conds["C3"] = _edges_preserved(R, G, tgt_class)
        conds["C4"] = _nf_to_nf(nf_src, nf_tgt, G)
        conds["C5"] = _injective_on_nf(nf_src, G)
    elif mapping.mode == CPRIME:
        image = {G[s] for s in R.states}
        unhit = [s for s in Rp.states if s not in image]
        conds["C1'"] = _bad(unhit[0]) if unhit else _ok()
        src_norm, tgt_norm = check_normalizing(R), check_normalizing(Rp)
        if not src_norm.holds:
            conds["C2'"] = _bad({"source": src_norm.witness})
        elif not tgt_norm.holds:
            conds["C2'"] = _bad({"target": tgt_norm.witness})
        else:
            conds["C2'"] = _ok()
        c3 = _edges_preserved(R, G, tgt_class)
        if c3.holds:
            # every pullback of a target class must sit inside one source class
            src_class = class_index(R)
            owner: dict[int, str] = {}
            for s in R.states:
                k = tgt_class[G[s]]
                if k in owner and src_class[owner[k]] != src_class[s]:
                    c3 = _bad((owner[k], s))
                    break
                owner.setdefault(k, s)
        conds["C3'"] = c3
        c4 = _nf_to_nf(nf_src, nf_tgt, G)
        if c4.holds:
            for s in R.states:
                if G[s] in nf_tgt and s not in nf_src:
                    c4 = _bad(s)
                    break
        conds["C4'"] = c4
        conds["C5'"] = _injective_on_nf(nf_src, G)
    else:
        raise ValueError(f"unknown mode {mapping.mode!r}")
    return ConditionReport(mapping.mode, conds, target_conf)


def conclude(report: ConditionReport, as_term_evidence: Decision | None = None) -> Conclusion:
    """Turn a condition report, plus optional a.s.-termination evidence, into a conclusion."""
    as_term = as_term_evidence is not None and as_term_evidence.holds
    if report.mode == C:
        if report.failed:
            return Conclusion.INCONCLUSIVE
        return Conclusion.SOURCE_AS_CONVERGENT if as_term else Conclusion.SOURCE_CONFLUENT
    if not all(c.holds for c in report.conditions.values()):
        return Conclusion.INCONCLUSIVE
    if report.target_confluence.verdict is Verdict.UNKNOWN:
        return Conclusion.INCONCLUSIVE
    confluent = report.target_confluence.holds
    if as_term:
        return Conclusion.SOURCE_AS_CONVERGENT if confluent else Conclusion.SOURCE_NOT_AS_CONVERGENT
    return Conclusion.SOURCE_CONFLUENT if confluent else Conclusion.SOURCE_NOT_CONFLUENT


def failed_condition(report: ConditionReport) -> str | None:
    failed = report.failed
    return failed[0] if failed else None


def load_mapping(document, source: Pars, target: Pars, mode: str | None = None) -> TransformMapping:
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    if not isinstance(document, Mapping) or not isinstance(document.get("G"), Mapping):
        raise ParseError("mapping document needs a 'G' object")
    mode = mode or document.get("mode", C)
    if mode not in (C, CPRIME):
        raise ParseError(f"mode must be 'C' or 'Cprime', got {mode!r}")
    G = {str(k): str(v) for k, v in document["G"].items()}
    return TransformMapping(source, target, G, mode)


def mapping_to_dict(m: TransformMapping, source_name="source", target_name="target") -> dict:
    return {"mode": m.mode, "source": source_name, "target": target_name,
            "G": dict(sorted(m.G.items()))}


__all__ = ["C", "CPRIME", "Conclusion", "ConditionReport", "TransformMapping",
           "check_conditions", "conclude", "convertibility_classes", "load_mapping"]
