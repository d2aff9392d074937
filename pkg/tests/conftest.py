import pytest
from loguru import logger
from pipeline import GossetPipeline

E8_INTEGER_PARTS = (209, 338, 415, 502, 618, 672, 813, 1000)
E8_TABLE = (209, 338, 416, 502, 618, 673, 813, 1000)
# 1000 m_i / m_8 for the E8 masses m_1 = 1, m_2 = 2 cos(pi/5), m_3 = 2 cos(pi/30), ...
E8_NORMALIZED = (209.057, 338.261, 415.823, 502.754, 618.034, 672.816, 813.473, 1000.0)
E8_F1 = (1, -15, 75, -135, 45)
E8_F2 = (1, -15, 60, -90, 45)

@pytest.fixture(scope='session', autouse=True)
def quiet_logs():
    logger.remove()
    yield

@pytest.fixture(autouse=True)
def detach_sinks():
    # main() adds a sink on the captured stderr of the running test
    yield
    logger.remove()

@pytest.fixture(scope='session')
def pipelines():
    """Factory returning one shared pipeline per type label."""
    cache: dict[str, GossetPipeline] = {}

    def get(label: str) -> GossetPipeline:
        if label not in cache:
            cache[label] = GossetPipeline(label)
        return cache[label]

    return get

@pytest.fixture(scope='session')
def a2(pipelines) -> GossetPipeline:
    return pipelines('A2')

@pytest.fixture(scope='session')
def g2(pipelines) -> GossetPipeline:
    return pipelines('G2')

@pytest.fixture(scope='session')
def e8(pipelines) -> GossetPipeline:
    return pipelines('E8')
