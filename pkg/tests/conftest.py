import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long multi-minute sweeps (deselect with -m 'not slow')"
    )


@pytest.fixture
def tmp_out(tmp_path):
    return tmp_path / "out"
