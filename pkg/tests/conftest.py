import random
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from parskit import Pars, Rule
from parskit.corpus import builtin

ACCEPTANCE_LINES: list[str] = []


def random_pars(rng: random.Random, max_states: int = 12) -> Pars:
    """A validated random PARS: each state gets 0-3 distinct successors with integer weights."""
    n = rng.randint(1, max_states)
    names = [f"s{i:02d}" for i in range(n)]
    rules = []
    for s in names:
        k = rng.choice([0, 0, 1, 1, 2, 2, 3])
        targets = rng.sample(names, min(k, n))
        weights = [rng.randint(1, 4) for _ in targets]
        total = sum(weights)
        rules += [Rule(s, t, Fraction(w, total)) for t, w in zip(targets, weights)]
    return Pars.build(names, rules)


@st.composite
def pars_systems(draw, max_states=8):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_pars(random.Random(seed), max_states)


@pytest.fixture
def hindley():
    return builtin("hindley_c").system


@pytest.fixture
def coin():
    return builtin("coin_b").system


@pytest.fixture
def loop():
    return builtin("loop_a").system


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")
