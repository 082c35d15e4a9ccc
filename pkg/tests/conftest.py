import pytest
from hypothesis import HealthCheck, settings

from abesd import abe, jose
from abesd.rng import SeededRng

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def abe_system():
    params, msk = abe.abe_setup(128, SeededRng("tests/abe"))
    return params, msk


@pytest.fixture(scope="session")
def params(abe_system):
    return abe_system[0]


@pytest.fixture(scope="session")
def msk(abe_system):
    return abe_system[1]


@pytest.fixture(scope="session")
def issuer_key():
    return jose.generate_signing_key(SeededRng("tests/issuer"))


@pytest.fixture(scope="session")
def holder_key():
    return jose.generate_signing_key(SeededRng("tests/holder"))


@pytest.fixture(scope="session")
def keygen(abe_system):
    params, msk = abe_system
    cache = {}

    def make(attrs):
        key = frozenset(attrs)
        if key not in cache:
            cache[key] = abe.abe_keygen(msk, params, sorted(key), SeededRng("tests/sk/" + ",".join(sorted(key))))
        return cache[key]

    return make


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {text}")
