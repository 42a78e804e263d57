import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from abjm_vortex.functionals import tail_extrapolate  # noqa: E402
from abjm_vortex.params import VortexParams  # noqa: E402
from abjm_vortex.shooter import InitialData, integrate  # noqa: E402
from abjm_vortex.targeting import TargetSpec, classify, solve_target  # noqa: E402


@lru_cache(maxsize=None)
def run(n1, n2, alpha1, alpha2):
    """Cached default-controls integration and its tail estimate."""
    prof = integrate(VortexParams(n1, n2), InitialData(alpha1, alpha2))
    return prof, tail_extrapolate(prof)


@lru_cache(maxsize=None)
def shot(alpha, L, n1=1, n2=1):
    return classify(alpha, L, VortexParams(n1, n2))


@lru_cache(maxsize=None)
def solved(kind, value, L, n1=1, n2=1):
    return solve_target(TargetSpec(kind, value, L), VortexParams(n1, n2))


def random_inits(n=50, seed=12345):
    """The randomized sweep: alpha in [-6, 6]^2, N1, N2 in {1, 2, 3}."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        n1, n2 = (int(x) for x in rng.integers(1, 4, size=2))
        a1, a2 = (float(x) for x in rng.uniform(-6, 6, size=2))
        out.append((n1, n2, a1, a2))
    return out


@pytest.fixture(scope="session")
def integrable_run():
    """A converged integrable shot (N1 = N2 = 1, alpha = 5 on L = 0)."""
    return run(1, 1, 5.0, 5.0)


@pytest.fixture(scope="session")
def divergent_run():
    return run(1, 1, -3.0, -3.0)


# acceptance results, printed after the run: number -> (passed, title, detail)
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        line = f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
