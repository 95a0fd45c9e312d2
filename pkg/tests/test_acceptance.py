"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
(and immediately with ``-s``).
"""

import io
import json
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction as F

import mpmath
import pytest

from parskit import (
    LyapunovCertificate,
    Verdict,
    absorption_solve,
    check_as_convergence,
    check_as_local_convergence,
    check_as_termination,
    check_confluence,
    check_local_confluence,
    check_lyapunov,
    check_normalizing,
    check_prob_normalizing,
    check_termination,
    check_unique_nf,
    divergence_bracket,
    explore,
    min_margin,
    monte_carlo,
    normal_forms,
    pn_iterate,
    single_path_divergence_bounds,
)
from parskit.ars import Decision
from parskit.certify import herman_valuation
from parskit.cli import main
from parskit.corpus import (
    HERMAN_G,
    builtin,
    finite_entries,
    herman_pruned,
    herman_quotient,
    herman_ring,
    random_walk,
    random_walk_generated,
    random_walk_mapping,
    loop_exit_mapping,
)
from parskit.transform import CPRIME, Conclusion, TransformMapping, check_conditions, conclude

from .conftest import ACCEPTANCE_LINES, random_pars

pytestmark = pytest.mark.acceptance

@contextmanager
def criterion(number: int, title: str):
    notes: list[str] = []
    try:
        yield notes
    except BaseException:
        line = f"[FAIL] {number}. {title}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"[PASS] {number}. {title}" + (f": {'; '.join(notes)}" if notes else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def cli_json(*argv):
    out = io.StringIO()
    code = main([*argv, "--json"], stdout=out)
    return code, json.loads(out.getvalue())


def as_term_from(report):
    return Decision("as_termination", Verdict.YES if report.holds else Verdict.NO)


def test_1_table_reproduction():
    with criterion(1, "Table reproduction") as notes:
        t0 = time.perf_counter()
        for name, row in [("loop_a", "++----"), ("coin_b", "++-+++"), ("hindley_c", "+----+")]:
            code, rep = cli_json("analyze", f"corpus:{name}")
            assert code == 0 and rep["results"]["row"] == row, (name, rep["results"]["row"])

        bracket = divergence_bracket(builtin("ladder_d").system, "0", 80, 60)
        assert bracket.lo > F(68, 100) and bracket.width < F(1, 1000)
        factors = [1 - F(1, 4 ** i) for i in range(1, 51)]
        single = single_path_divergence_bounds(factors, 50, F(1, 3 * 4 ** 50))
        assert single.lo > F(68, 100)
        code, rep = cli_json("analyze", "corpus:ladder_d", "--depth", "80", "--iterate", "60")
        assert code == 0 and rep["results"]["row"] == "++----"

        cert_report = check_lyapunov(explore(builtin("ladder_dprime").system, 80),
                                     builtin("ladder_dprime").certificate)
        assert cert_report.holds
        code, rep = cli_json("analyze", "corpus:ladder_dprime", "--depth", "80", "--iterate", "60")
        assert code == 0 and rep["results"]["row"] == "++-+++"
        elapsed = time.perf_counter() - t0
        assert elapsed < 5
        notes += [f"ladder_d lower bound {float(bracket.lo):.6f}", f"width {float(bracket.width):.1e}",
                  f"{elapsed:.2f} s"]


def test_2_ladder_divergence_value():
    with criterion(2, "Ladder divergence value") as notes:
        factors = [1 - F(1, 4 ** i) for i in range(1, 51)]
        b = single_path_divergence_bounds(factors, 50, F(1, 3 * 4 ** 50))
        assert b.width < F(1, 10 ** 20)
        # 0.68854 is the five-decimal rounding of the product
        assert round(float(b.lo), 5) == 0.68854 and round(float(b.hi), 5) == 0.68854
        with mpmath.workdps(50):
            q = mpmath.qp(mpmath.mpf(1) / 4, mpmath.mpf(1) / 4)
            assert mpmath.mpf(b.lo.numerator) / b.lo.denominator <= q
            assert q <= mpmath.mpf(b.hi.numerator) / b.hi.denominator

        window = explore(builtin("ladder_d").system, 60)
        product = F(1)
        for n in range(1, 51):
            product *= factors[n - 1]
            assert pn_iterate(window, "0", n).alive_mass == product
        notes += [f"[{float(b.lo):.12f}, {float(b.hi):.12f}]", f"width {float(b.width):.1e}"]


def test_3_exact_distribution_law():
    with criterion(3, "Exact distribution law") as notes:
        states = 0
        for entry in finite_entries():
            s = entry.system
            if not s.probabilistic:
                continue
            solved = absorption_solve(s)
            nfs = normal_forms(s)
            for st in s.states:
                r = solved[st]
                assert sum(r.reach.values(), F(0)) + r.divergence == 1, (entry.name, st)
                succ = s.successors(st)
                if succ:
                    for t in nfs:
                        step = sum((p * solved[u].reach.get(t, F(0)) for u, p in succ), F(0))
                        assert r.reach.get(t, F(0)) == step, (entry.name, st, t)
                else:
                    assert r.reach == {st: 1}
                states += 1
        notes.append(f"{states} states checked exactly")


def test_4_hindley_probabilities():
    with criterion(4, "Hindley probabilities") as notes:
        s = builtin("hindley_c").system
        r = absorption_solve(s)["0"]
        assert r.reach == {"a": F(2, 3), "b": F(1, 3)}
        mass = {"a": F(0), "b": F(0)}
        alive = F(0)
        stack = [("0", F(1), 0)]
        while stack:
            st, p, k = stack.pop()
            succ = s.successors(st)
            if not succ:
                mass[st] += p
            elif k == 30:
                alive += p
            else:
                stack += [(t, p * q, k + 1) for t, q in succ]
        assert alive < F(1, 2 ** 14)
        for t in mass:
            assert mass[t] <= r.reach[t] <= mass[t] + alive
        notes.append(f"enumeration tail {float(alive):.1e}")


def test_5_implication_chain():
    with criterion(5, "Implication chain") as notes:
        systems = [e.system for e in finite_entries() if e.system.probabilistic]
        systems += [random_pars(random.Random(seed), 12) for seed in range(200)]
        violations = []
        for i, s in enumerate(systems):
            term = check_termination(s).holds
            as_term = check_as_termination(s).holds
            norm = check_normalizing(s).holds
            conf = check_confluence(s).holds
            as_conv = check_as_convergence(s).holds
            checks = {
                "term => as_term": not term or as_term,
                "as_term => norm": not as_term or norm,
                "norm <=> prob_norm": norm == check_prob_normalizing(s).holds,
                "as_loc_conv => as_term": not check_as_local_convergence(s).holds or as_term,
                "as_conv <=> as_term and conf": as_conv == (as_term and conf),
                "as_conv => conf": not as_conv or conf,
                "newman": not (term and check_local_confluence(s).holds) or conf,
                "unique_nf <=> conf": not norm or check_unique_nf(s).holds == conf,
            }
            violations += [(i, k) for k, ok in checks.items() if not ok]
        assert not violations, violations[:5]
        notes.append(f"{len(systems)} systems, 0 violations")


def test_6_random_walk():
    with criterion(6, "Random walk") as notes:
        t0 = time.perf_counter()
        window = explore(random_walk_generated(), 10_001)
        report = check_lyapunov(window, builtin("random_walk").certificate)
        assert report.holds
        assert all(report.margins[str(k)] == F(1, 3) for k in range(10_001))
        assert min_margin(report) == ("0", F(1, 3))

        q = absorption_solve(random_walk(100))["0"].reach["a"]
        assert 1 - q < F(1, 2 ** 90)
        # the reflecting truncation is absorbed surely; the open window bounds the infinite walk
        lost = divergence_bracket(random_walk_generated(), "0", 100, 100).hi
        assert lost < F(1, 2 ** 90)

        for N in (1, 2, 5, 10, 25):
            cond = check_conditions(random_walk_mapping(N))
            assert not cond.failed
            assert conclude(cond, as_term_from(report)) is Conclusion.SOURCE_AS_CONVERGENT
        elapsed = time.perf_counter() - t0
        assert elapsed < 10
        notes += [f"P(0 ->* a) >= 1 - 2^{math.log2(float(lost)):.1f} on the open window",
                  f"{elapsed:.2f} s"]


def test_7_herman():
    with criterion(7, "Herman") as notes:
        ring = herman_ring(3)
        assert len(ring.states) == 8
        assert dict(ring.successors("[111]")) == {t: F(1, 4) for t in ("[001]", "[010]", "[100]", "[111]")}
        assert dict(ring.successors("[110]")) == {t: F(1, 4) for t in ("[011]", "[101]", "[000]", "[110]")}

        pruned = herman_pruned()
        entry = builtin("herman3_pruned")
        report = check_lyapunov(pruned, entry.certificate)
        assert report.holds
        for s, m in report.margins.items():
            if s.count("1") == 2:
                assert m == herman_valuation(s) - F(19, 2) > 0
        state, low = min_margin(report)

        cond = check_conditions(TransformMapping(pruned, herman_quotient(), HERMAN_G, CPRIME))
        assert not cond.failed
        assert conclude(cond, as_term_from(report)) is Conclusion.SOURCE_AS_CONVERGENT
        assert check_as_convergence(pruned).verdict is Verdict.YES

        # documented deltas: formula value of V([101]) and the [011] self-loop
        assert herman_valuation("[101]") == 13
        assert dict(ring.successors("[011]"))["[011]"] == F(1, 4)
        assert set(entry.annotations["known_deltas"]) >= {"V([101])"}
        assert "[011] self-loop" in builtin("herman3").annotations["known_deltas"]
        notes += [f"min margin {low} at {state}", "V([101]) = 13, [011] loop 1/4"]


def test_8_monte_carlo():
    with criterion(8, "Monte Carlo consistency") as notes:
        s = builtin("hindley_c").system
        bound = 3 * math.sqrt((2 / 9) / 10 ** 5)
        within = 0
        for seed in range(100):
            a = monte_carlo(s, "0", 1000, 10 ** 5, seed)
            b = monte_carlo(s, "0", 1000, 10 ** 5, seed)
            assert a == b, seed
            within += abs(a.fraction("a") - 2 / 3) <= bound
        assert within >= 99
        notes.append(f"{within}/100 seeds within 3 sigma, reruns identical")


def test_9_transformation_example():
    with criterion(9, "Transformation example") as notes:
        for p in (F(1, 4), F(1, 2), F(3, 4)):
            m = loop_exit_mapping(p)
            report = check_conditions(m)
            assert [c for c in report.conditions] == ["C1", "C2", "C3", "C4", "C5"]
            assert not report.failed
            evidence = as_term_from(check_lyapunov(m.source, LyapunovCertificate.named("loop_exit", 1 - p)))
            assert conclude(report, evidence) is Conclusion.SOURCE_AS_CONVERGENT
        notes.append("p in {1/4, 1/2, 3/4}")
