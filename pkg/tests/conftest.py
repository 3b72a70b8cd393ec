import numpy as np
import pytest

from icgof import datagen as dg
from icgof.gof import run_test
from icgof.seeding import derive_seed
from icgof.simharness import Cell


def null_results(n, p, trials, dist="gaussian", structure="I", master_seed=0):
    """Test results on null data seeded exactly as the simulation harness seeds them."""
    cell = Cell(structure, dist, p, None)
    cs = dg.CovStructure.preset(structure, p, seed=derive_seed(master_seed, cell.key, "sigma"))
    return [
        run_test(dg.gen_null(n, cs, dist, derive_seed(master_seed, cell.key, t)))
        for t in range(trials)
    ]


@pytest.fixture(scope="session")
def null_400x100():
    return null_results(400, 100, 500)


@pytest.fixture(scope="session")
def null_400x400():
    return null_results(400, 400, 500)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for the terminal summary, then assert."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
