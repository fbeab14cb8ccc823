import pytest

from tugofwar.params import asymmetric_config, symmetric_config


@pytest.fixture
def sym10():
    return symmetric_config(V_F=10.0, n_total=4)


@pytest.fixture
def sym50():
    return symmetric_config(V_F=50.0)


@pytest.fixture(params=[10.0, 30.0, 50.0])
def symmetric_family(request):
    return symmetric_config(V_F=request.param)


@pytest.fixture(params=[20.0, 30.0, 40.0])
def asymmetric_family(request):
    return asymmetric_config(V_F=request.param)


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
