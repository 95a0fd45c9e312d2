from fractions import Fraction as F

import pytest

from parskit import Verdict, absorption_solve, explore, normal_forms, validate
from parskit.corpus import (
    NAMES,
    TABLE_ONE,
    builtin,
    export,
    finite_entries,
    herman_pruned,
    herman_ring,
    random_walk,
    random_walk_generated,
    table_row,
)
from parskit.errors import UnknownEntry
from parskit.window import PROPERTIES, window_row

SIGN = {True: Verdict.YES, False: Verdict.NO, None: Verdict.UNKNOWN}


def herman_step(bits):
    """Distribution of the next ring configuration, by direct enumeration of choices."""
    n = len(bits)
    holders = [i for i, b in enumerate(bits) if b]
    out = {}
    for mask in range(2 ** len(holders)):
        nxt = [0] * n
        for j, i in enumerate(holders):
            dest = (i - 1) % n if mask >> j & 1 else i
            nxt[dest] += 1
        key = "[" + "".join(str(c % 2) for c in nxt) + "]"
        out[key] = out.get(key, F(0)) + F(1, 2 ** len(holders))
    return out


class TestRegistry:
    def test_hindley(self):
        e = builtin("hindley_c")
        assert len(e.system.states) == 4 and len(e.system.rules) == 4
        assert {r.p for r in e.system.rules} == {F(1, 2)}
        assert [e.expected[p] for p in PROPERTIES] == [True, False, False, False, False, True]

    def test_dprime_row(self):
        assert [builtin("ladder_dprime").expected[p] for p in PROPERTIES] == [True, True, False,
                                                                             True, True, True]

    def test_loop_row(self):
        assert [builtin("loop_a").expected[p] for p in PROPERTIES] == [True, True] + [False] * 4

    def test_unknown(self):
        with pytest.raises(UnknownEntry):
            builtin("nope")

    @pytest.mark.parametrize("name", [n for n in NAMES])
    def test_rows_match(self, name):
        e = builtin(name)
        row = table_row(e)
        for p, v in e.expected.items():
            if p in row:
                assert row[p] is SIGN[v], (name, p)

    def test_finite_entries_validate(self):
        for e in finite_entries():
            assert validate(e.system).ok, e.name

    def test_table_one(self):
        assert TABLE_ONE == ("loop_a", "coin_b", "hindley_c", "ladder_d", "ladder_dprime")


class TestHerman:
    def test_eight_states(self):
        assert len(herman_ring(3).states) == 8

    def test_all_three(self):
        s = herman_ring(3)
        assert dict(s.successors("[111]")) == {t: F(1, 4) for t in ("[001]", "[010]", "[100]", "[111]")}

    def test_two_tokens(self):
        s = herman_ring(3)
        assert dict(s.successors("[110]")) == {t: F(1, 4) for t in ("[011]", "[101]", "[000]", "[110]")}

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_matches_direct_enumeration(self, n):
        s = herman_ring(n)
        for st in s.states:
            bits = [int(c) for c in st[1:-1]]
            if any(bits):
                assert dict(s.successors(st)) == herman_step(bits)

    def test_ring_of_one(self):
        assert herman_ring(1).successors("[1]") == (("[1]", F(1)),)

    def test_deltas_documented(self):
        assert dict(herman_ring(3).successors("[011]"))["[011]"] == F(1, 4)
        deltas = builtin("herman3_pruned").annotations["known_deltas"]
        assert "13" in deltas["V([101])"] and "14" in deltas["V([101])"]
        assert "1/4" in builtin("herman3").annotations["known_deltas"]["[011] self-loop"]

    def test_parity_preserved(self):
        s = herman_ring(5)
        for r in s.rules:
            assert r.source.count("1") % 2 == r.target.count("1") % 2

    def test_pruned_normal_forms(self):
        assert normal_forms(herman_pruned()) == {"[000]", "[100]"}

    @pytest.mark.parametrize("n", [0, 13])
    def test_bounds(self, n):
        with pytest.raises(ValueError):
            herman_ring(n)


class TestRandomWalk:
    def test_two(self):
        assert {(r.source, r.target): r.p for r in random_walk(2).rules} == {
            ("0", "a"): F(2, 3), ("0", "1"): F(1, 3), ("1", "0"): F(2, 3),
            ("1", "2"): F(1, 3), ("2", "1"): F(1)}

    def test_hundred(self):
        q = absorption_solve(random_walk(100))["0"].reach["a"]
        assert 1 - q < F(1, 2 ** 90)

    def test_generated_frontier(self):
        assert explore(random_walk_generated(), 5).frontier == {"5"}


class TestWindowRows:
    def test_ladder_bases(self):
        row = window_row(builtin("ladder_d").system, 80, 60)
        assert row["as_termination"].verdict is Verdict.NO
        assert row["termination"].verdict is Verdict.NO

    def test_certificate_needed_for_dprime(self):
        row = window_row(builtin("ladder_dprime").system, 40, 40)
        assert row["as_termination"].verdict is Verdict.UNKNOWN
        row = window_row(builtin("ladder_dprime").system, 40, 40, builtin("ladder_dprime").certificate)
        assert row["as_termination"].verdict is Verdict.YES


class TestExport:
    def test_finite(self):
        doc, side = export(builtin("coin_b"))
        assert doc["kind"] == "pars" and side["expected"]["confluence"] is True

    def test_generated_window(self):
        doc, side = export(builtin("random_walk"), 6)
        assert side["window_depth"] == 6 and "mapping" in side and "certificate" in side
        assert "6" in doc["states"]
