import pytest

from artinlen.algebra import build_algebra, load_ring

# (criterion, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE: list = []


@pytest.fixture(scope="session")
def ring():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_algebra(load_ring(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def x2y2(ring):
    return ring("x2y2")


@pytest.fixture(scope="session")
def m2zero(ring):
    return ring("m2zero")


@pytest.fixture(scope="session")
def lescot132(ring):
    return ring("lescot132")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0].split()[1].rstrip(":"))):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
