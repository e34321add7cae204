import pytest

from mram.confset import rule_mismatches
from mram.ndtm import CORPUS, load_corpus

_criteria = []


@pytest.fixture(scope="session", autouse=True)
def rule_soundness_gate():
    """Nothing downstream of the step rules can be trusted if they are wrong."""
    for name in CORPUS:
        for S in (1, 2, 3):
            bad = rule_mismatches(load_corpus(name), S)
            if bad:
                pytest.exit(f"rule soundness gate failed for {name}, S={S}: {bad[:3]}", returncode=1)


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, text, passed):
        _criteria.append((number, text, passed))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, passed in sorted(_criteria):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} [{number}] {text}")
