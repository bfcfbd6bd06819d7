"""
Tests for the built-in self-test suite.
"""

import pytest

from mahler_lab.selftest import CHECKS, CheckResult, run_selftest


class TestRunSelftest:
    """Test run_selftest."""

    def test_all_checks_pass(self):
        results = run_selftest()
        assert [r.name for r in results] == list(CHECKS)
        failed = {r.name: r.detail for r in results if not r.passed}
        assert failed == {}

    def test_subset(self):
        results = run_selftest(["basis", "transference"])
        assert [r.name for r in results] == ["basis", "transference"]
        assert all(isinstance(r, CheckResult) for r in results)

    def test_failure_is_reported_not_raised(self, monkeypatch):
        def broken() -> str:
            raise AssertionError("boom")

        monkeypatch.setitem(CHECKS, "basis", broken)
        (result,) = run_selftest(["basis"])
        assert not result.passed
        assert result.detail == "AssertionError: boom"

    def test_unknown_check(self):
        with pytest.raises(KeyError):
            run_selftest(["nosuch"])

    def test_to_dict(self):
        (result,) = run_selftest(["basis"])
        data = result.to_dict()
        assert data["name"] == "basis"
        assert data["passed"] is True
        assert float(data["seconds"]) >= 0
