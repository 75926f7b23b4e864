"""Acceptance criteria: one test per criterion, each printing its PASS/FAIL line."""
import pytest

from lambda_fluor.validation import CRITERIA, run_check


@pytest.mark.parametrize("criterion", CRITERIA, ids=[fn.__name__ for fn in CRITERIA])
def test_criterion(criterion, capsys):
    check = run_check(criterion)
    with capsys.disabled():
        print(f"\n{check.line()}")
    assert check.passed, check.detail
