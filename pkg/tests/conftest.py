import pytest

_CRITERIA: dict[int, list[tuple[str, str, float]]] = {}
_BUDGETS: dict[int, float] = {}


def pytest_addoption(parser):
    parser.addoption("--long", action="store_true", default=False,
                     help="run long rows (table 1 m > 8, table 2 m = 3)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long"):
        return
    skip = pytest.mark.skip(reason="long-running; enable with --long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num = mark.args[0]
    if "budget" in mark.kwargs:
        _BUDGETS[num] = mark.kwargs["budget"]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA.setdefault(num, []).append((item.name, rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        res = _CRITERIA[num]
        failed = [name for name, o, _ in res if o == "failed"]
        ran = [o for _, o, _ in res if o != "skipped"]
        seconds = sum(d for _, o, d in res if o != "skipped")
        budget = _BUDGETS.get(num)
        over = budget is not None and seconds > budget
        if failed or over:
            status = "FAIL"
        elif ran:
            status = "PASS"
        else:
            status = "SKIP"
        line = f"criterion {num:2d}: {status}  ({len(ran) - len(failed)}/{len(ran)} checks passed"
        skipped = len(res) - len(ran)
        line += f", {skipped} skipped" if skipped else ""
        line += f", {seconds:.1f} s"
        line += f" of {budget:g} s budget)" if budget is not None else ")"
        tr.write_line(line)
        for name in failed:
            tr.write_line(f"    failed: {name}")
        if over:
            tr.write_line("    over the time budget")
