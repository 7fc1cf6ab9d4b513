import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from spheremaps.poly_core import MultiPoly

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def random_poly(rng: random.Random, nvars: int, max_deg: int, nterms: int, homogeneous_deg=None):
    terms = {}
    for _ in range(nterms):
        if homogeneous_deg is None:
            d = rng.randint(0, max_deg)
        else:
            d = homogeneous_deg
        exps = [0] * nvars
        for _ in range(d):
            exps[rng.randrange(nvars)] += 1
        terms[tuple(exps)] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return MultiPoly(nvars, terms)


@pytest.fixture
def rng():
    return random.Random(20240517)


_ACCEPTANCE: dict = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(num, title, checks, elapsed, budget)."""

    def record(num, title, checks, elapsed, budget):
        failed = [name for name, ok in checks.items() if not ok]
        if elapsed > budget:
            failed.append(f"runtime {elapsed:.1f}s > {budget}s")
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {num}: {status} {title} ({elapsed:.1f}s of {budget}s)"
        if failed:
            line += " failed: " + "; ".join(failed)
        _ACCEPTANCE[num] = line
        print(line)
        return not failed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[num])
