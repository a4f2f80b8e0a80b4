from collections import defaultdict

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and marker.args:
        rep.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    results = defaultdict(list)
    for reports in terminalreporter.stats.values():
        for rep in reports:
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props and getattr(rep, "when", None) in ("setup", "call"):
                if rep.when == "call" or rep.failed:
                    results[props["criterion"]].append((rep.nodeid.split("::")[-1], rep.passed))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(results):
        tests = results[crit]
        status = "PASS" if all(ok for _, ok in tests) else "FAIL"
        failed = [name for name, ok in tests if not ok]
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {crit:>2}: {status} [{len(tests)} checks]{detail}")
