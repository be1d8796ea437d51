"""Acceptance criteria 1 to 11, computed by the built-in validation suite."""

import pytest

from spectral_beam.validation import CHECKS, run_check

RESULTS = {}


@pytest.mark.parametrize("number", [n for n, _, _ in CHECKS], ids=[f"{n:02d}-{name}" for n, name, _ in CHECKS])
def test_criterion(number):
    r = run_check(number)
    RESULTS[number] = r
    print(f"{'PASS' if r.passed else 'FAIL'} {r.number}: {r.name}: {r.detail}")
    assert r.passed, r.detail
