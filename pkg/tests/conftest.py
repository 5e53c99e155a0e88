import random

import pytest

from morphan.corpus import AnalogyQuadruple


def random_word(rng, alphabet="abcdefghij", lo=1, hi=8):
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))


def distinct_quadruples(n, seed=0, alphabet="abcdefghij"):
    """``n`` quadruples whose four words are pairwise distinct."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        words = [random_word(rng, alphabet) for _ in range(4)]
        if len(set(words)) == 4:
            out.append(AnalogyQuadruple(*words))
    return out


@pytest.fixture
def quad():
    return AnalogyQuadruple("cat", "cats", "dog", "dogs")


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict = {}


def record(criterion: int, passed: bool, detail: str):
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"criterion {criterion:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
