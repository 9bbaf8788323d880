import random

import hypothesis
import hypothesis.strategies as st
import pytest

from stationary_lab.words import LETTERS, ReducedWord, reduce

hypothesis.settings.register_profile("default", max_examples=200, derandomize=True, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=5000, deadline=None)
hypothesis.settings.load_profile("default")

letters = st.sampled_from([int(x) for x in LETTERS])
raw_words = st.lists(letters, max_size=30)
reduced_words = raw_words.map(reduce)


def random_reduced(rng: random.Random, length: int) -> ReducedWord:
    out = []
    while len(out) < length:
        x = rng.randrange(4)
        if out and out[-1] == x ^ 1:
            continue
        out.append(x)
    return ReducedWord._trusted(tuple(out))


@pytest.fixture
def rng():
    return random.Random(20110201)


# Acceptance lines, printed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
