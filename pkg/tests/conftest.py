import pytest


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome, props.get("summary", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for crit, outcome, summary in sorted(lines):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {crit}: {summary}")


@pytest.fixture
def criterion(record_property, request):
    """Register a test as one acceptance criterion; call the fixture with a one-line summary."""
    marker = request.node.get_closest_marker("criterion")
    record_property("criterion", marker.args[0])

    def summarize(text: str) -> None:
        record_property("summary", text)
        print(f"criterion {marker.args[0]}: {text}")

    return summarize
