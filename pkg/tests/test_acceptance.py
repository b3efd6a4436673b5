"""Acceptance criteria: one PASS/FAIL line per criterion, asserted individually."""

import pytest

from quasiqec.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    status = "PASS" if result.passed else "FAIL"
    with capsys.disabled():
        print(f"\ncriterion {number:2d} [{status}] {result.title}")
        for check in result.failures():
            print(f"    failed: {check.name}: value={check.value!r} reference={check.reference!r} "
                  f"tol={check.tol} {check.note}")
    assert result.passed, [c.name for c in result.failures()]
