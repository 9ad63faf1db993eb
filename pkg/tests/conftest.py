import time
import numpy as np
import pytest

from msk.exact import bad_example, random_coverage, random_modular, trial_rng

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def counterexample():
    return bad_example(8)


def coverage_instance(n, seed):
    return random_coverage(n, trial_rng(seed, n))


def modular_instance(n, seed):
    return random_modular(n, trial_rng(seed, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def adversarial_full():
    """Full worst-case instance at the default epsilon, verified once per session.

    Returns (instance, report, seconds spent generating plus verifying).
    """
    from msk.adversarial import DEFAULT_EPSILON, gen_adversarial, verify_adversarial
    t0 = time.perf_counter()
    inst = gen_adversarial(DEFAULT_EPSILON)
    report = verify_adversarial(inst)
    return inst, report, time.perf_counter() - t0
