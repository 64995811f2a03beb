import pytest


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_result(n, *mod.RESULTS[n]))


@pytest.fixture(params=["python", "cython"])
def backend(request, monkeypatch):
    """Run a test against one kernel backend."""
    from orbicheck import exactpoly, kernel

    if request.param == "cython":
        try:
            from orbicheck import _ckernel as impl
        except ImportError:
            pytest.skip("compiled kernel not built")
    else:
        from orbicheck import _pykernel as impl
    for name in ("add_terms", "mul_terms", "scale_shift", "divmod_terms"):
        monkeypatch.setattr(kernel, name, getattr(impl, name))
        if hasattr(exactpoly, name):
            monkeypatch.setattr(exactpoly, name, getattr(impl, name))
    return request.param
