_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _criteria.setdefault(m.args[0], {"title": m.args[1], "ids": set(), "failed": False, "ran": 0})
            _criteria[m.args[0]]["ids"].add(item.nodeid)


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid in entry["ids"]:
            if report.failed or report.skipped:
                entry["failed"] = True
            if report.when == "call" and report.passed:
                entry["ran"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        e = _criteria[n]
        ok = not e["failed"] and e["ran"] == len(e["ids"])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {e['title']}")
