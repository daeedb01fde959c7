"""Shared fixtures and the acceptance-verdict reporter.

The canonical dataset and its discovery run are expensive (~1.5 s each),
so they are built once per session and shared read-only across tests.
"""

import time

import pytest

from vned.pipeline import run_discovery
from vned.synth import canonical_config, generate

_VERDICTS: list[str] = []


def verdict(criterion: str, ok: bool, detail: str) -> None:
    """Record and print one pass/fail line for an acceptance criterion."""
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    _VERDICTS.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def canonical_synth():
    return generate(canonical_config())


@pytest.fixture(scope="session")
def canonical_dataset(canonical_synth):
    return canonical_synth.dataset


@pytest.fixture(scope="session")
def canonical_gt(canonical_dataset):
    return {det.id: det.gt_label for det in canonical_dataset.detections}


@pytest.fixture(scope="session")
def canonical_run(canonical_dataset):
    """Full three-stage run on the canonical dataset, plus wall time."""
    start = time.perf_counter()
    result = run_discovery(canonical_dataset, k=20, seed=42, stages="123")
    elapsed = time.perf_counter() - start
    return result, elapsed
