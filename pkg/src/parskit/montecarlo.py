"""Monte Carlo estimation of absorption probabilities.

An oracle independent of the exact solvers: it only needs the float
transition table.  Samples are split into fixed-size chunks, each with its
own child seed of ``SeedSequence(seed)``, so results are bit-identical for a
given seed regardless of how many workers run the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import UnknownState
from .model import _split

CHUNK = 1 << 14


@dataclass(frozen=True)
class MonteCarloReport:
    start: str
    seed: int
    samples: int
    max_steps: int
    counts: dict[str, int]
    censored: int
    frontier: int = 0

    def fraction(self, t: str) -> float:
        return self.counts.get(t, 0) / self.samples

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.samples

    def stderr(self, t: str) -> float:
        p = self.fraction(t)
        return math.sqrt(p * (1 - p) / self.samples)

    def to_dict(self) -> dict:
        return {
            "start": self.start, "seed": self.seed, "samples": self.samples,
            "max_steps": self.max_steps,
            "counts": dict(sorted(self.counts.items())),
            "estimates": {t: self.fraction(t) for t in sorted(self.counts)},
            "censored": self.censored, "censored_fraction": self.censored_fraction,
            "frontier": self.frontier,
        }


class _Table:
    def __init__(self, core, frontier):
        self.names = core.states
        index = {s: i for i, s in enumerate(self.names)}
        width = max((len(core.successors(s)) for s in self.names), default=0) or 1
        n = len(self.names)
        self.succ = np.zeros((n, width), dtype=np.int64)
        self.cum = np.ones((n, width))
        # 0 = absorbing normal form, 1 = reducible, 2 = frontier
        self.kind = np.zeros(n, dtype=np.int8)
        for i, s in enumerate(self.names):
            out = core.successors(s)
            if s in frontier:
                self.kind[i] = 2
                continue
            if not out:
                continue
            self.kind[i] = 1
            acc = 0.0
            for k, (t, p) in enumerate(out):
                acc += float(p)
                self.succ[i, k] = index[t]
                self.cum[i, k] = acc
            self.cum[i, len(out) - 1:] = 1.0
            self.succ[i, len(out):] = self.succ[i, len(out) - 1]
        self.index = index


def _run_chunk(table: _Table, start: int, size: int, max_steps: int, seq) -> np.ndarray:
    rng = np.random.default_rng(seq)
    pos = np.full(size, start, dtype=np.int64)
    steps = 0
    active = np.flatnonzero(table.kind[pos] == 1)
    while active.size and steps < max_steps:
        u = rng.random(active.size)
        here = pos[active]
        choice = (u[:, None] >= table.cum[here]).sum(axis=1)
        pos[active] = table.succ[here, choice]
        steps += 1
        active = active[table.kind[pos[active]] == 1]
    return pos


def monte_carlo(system, start: str, max_steps: int, samples: int, seed: int,
                workers: int = 1) -> MonteCarloReport:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    core, frontier = _split(system)
    table = _Table(core, frontier)
    if start not in table.index:
        raise UnknownState(start)
    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(table, table.index[start], size, max_steps, sq) for size, sq in zip(sizes, seqs)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            finals = list(pool.map(lambda a: _run_chunk(*a), jobs))
    else:
        finals = [_run_chunk(*a) for a in jobs]
    final = np.concatenate(finals)
    hist = np.bincount(final, minlength=len(table.names))
    counts, censored, at_frontier = {}, 0, 0
    for i, c in enumerate(hist):
        if not c:
            continue
        if table.kind[i] == 0:
            counts[table.names[i]] = int(c)
        elif table.kind[i] == 2:
            at_frontier += int(c)
        else:
            censored += int(c)
    return MonteCarloReport(start, seed, samples, max_steps, counts, censored, at_frontier)
