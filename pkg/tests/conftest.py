import pytest

from inavfiter.dto import TrajectoryParams
from inavfiter.earth import WGS84, EarthModel


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow tests"
    )


def pytest_collection_modifyitems(
    config: pytest.Config, items: list[pytest.Item]
) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def earth() -> EarthModel:
    return WGS84


@pytest.fixture
def coning_params() -> TrajectoryParams:
    return TrajectoryParams(mode="coning", duration=1.0)


@pytest.fixture
def level_params() -> TrajectoryParams:
    return TrajectoryParams(mode="level", duration=1.0)

