"""Acceptance criteria: one PASS/FAIL line per criterion.

Run directly (``python3 tests/test_acceptance.py``) for the bare table, or
through pytest, where each criterion is its own test and its line is
printed to the terminal.
"""
import json

import pytest

from hqwalk.acceptance import CRITERIA, run_all, run_criterion
from hqwalk.cli import main


@pytest.mark.parametrize("number", [num for num, _, _ in CRITERIA],
                         ids=[f"{num:02d}-{title.replace(' ', '_')}" for num, title, _ in CRITERIA])
def test_criterion(number, capsys):
    res = run_criterion(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail


def test_verify_command(tmp_path, capsys):
    # the helpers are cached, so this mostly replays the runs above
    status = main(["verify", "--out", str(tmp_path)])
    table = capsys.readouterr().out
    assert status == 0
    assert table.count("[PASS]") == len(CRITERIA) and "[FAIL]" not in table
    report = json.loads((tmp_path / "verify.json").read_text())
    assert [r["criterion"] for r in report] == [num for num, _, _ in CRITERIA]
    assert all(r["passed"] for r in report)
    assert (tmp_path / "manifest.json").exists()


if __name__ == "__main__":
    results = run_all()
    raise SystemExit(0 if all(r.passed for r in results) else 1)
