import numpy as np
import pytest

from levelhom import SimplicialComplex


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow; pass --runslow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def _c(*simplices):
    return SimplicialComplex.from_simplices(simplices)


FIXTURES = {
    "hollow_triangle": (_c((0, 1), (1, 2), (0, 2)), (1, 1)),
    "hollow_square": (_c((0, 1), (1, 2), (2, 3), (0, 3)), (1, 1)),
    "filled_square": (_c((0, 1, 2), (0, 2, 3)), (1, 0, 0)),
    "tetrahedron_boundary": (_c((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)), (1, 0, 1)),
    "two_vertices": (_c((0,), (1,)), (2,)),
    "edge": (_c((0, 1)), (1, 0)),
    "two_circles": (_c((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)), (2, 2)),
    "figure_eight": (_c((0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)), (1, 2)),
}


@pytest.fixture(params=sorted(FIXTURES))
def named_complex(request):
    """Small complexes with hand-computed Betti numbers."""
    c, b = FIXTURES[request.param]
    return request.param, c, b


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
