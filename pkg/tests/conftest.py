import pytest

from protoagent.model import asset_path, load_rules, parse_protocol


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one ACCEPTANCE PASS/FAIL line per release-criterion test."""
    verdicts = {}
    for category, verdict in (("passed", "PASS"), ("failed", "FAIL"),
                              ("error", "FAIL")):
        for report in terminalreporter.stats.get(category, ()):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid or "::test_" not in nodeid:
                continue
            name = nodeid.split("::test_", 1)[1]
            if verdict == "FAIL" or name not in verdicts:
                verdicts[name] = verdict
    for name in sorted(verdicts):
        terminalreporter.write_line(f"ACCEPTANCE {verdicts[name]}: {name}")


@pytest.fixture(scope="session")
def thorax_xml() -> str:
    return asset_path("protocols", "adult_thorax.xml").read_text(encoding="utf-8")


@pytest.fixture
def thorax(thorax_xml):
    return parse_protocol(thorax_xml)


@pytest.fixture(scope="session")
def rules():
    return load_rules()


@pytest.fixture(scope="session")
def scripts_dir():
    return asset_path("scripts")


@pytest.fixture(scope="session")
def cases_dir():
    return asset_path("cases")
