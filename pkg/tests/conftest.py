from importlib.resources import files

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")


def data_text(name: str) -> str:
    return files("normtptp.data").joinpath(name).read_text(encoding="utf-8")


@pytest.fixture
def chisholm_xml():
    return data_text("chisholm.xml")


@pytest.fixture
def vehicles_xml():
    return data_text("vehicles.xml")
