import pytest

from deutsch_noise import verify
from deutsch_noise.cli import main


@pytest.mark.slow
def test_verify_suite_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "11/11 checks passed" in out


def test_check_result_line():
    r = verify.CheckResult("demo", 2e-3, 1e-3)
    assert not r.passed and r.line().startswith("FAIL")
