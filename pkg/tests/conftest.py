import numpy as np
import pytest

from lislab import _pykernels, kernels

try:
    from lislab import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["python", "cython"])
def active_backend(request, monkeypatch):
    """Route the public kernel entry points through one backend."""
    impl = _pykernels if request.param == "python" else _ckernels
    if impl is None:
        pytest.skip("compiled kernels not built")
    for name in ("lis_strict", "evolve_row", "sweep"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, line, _ = results[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  #{k:<2d} {line}")
