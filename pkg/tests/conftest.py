import functools

import pytest

from doubleore.catalog import builtin
from doubleore.exactla import QQ, PrimeField, field_from_name
from doubleore.extension import build


@functools.lru_cache(maxsize=None)
def cached_build(name, params=(), field="q"):
    """Builds are reused across tests; reductions are memoized inside them."""
    return build(builtin(name, dict(params), field_from_name(field)).data)


@pytest.fixture(scope="session")
def bh():
    return cached_build("Bh", (("h", 2),))


@pytest.fixture(scope="session")
def bh_f5():
    return cached_build("Bh", (("h", 2),), "fp:5")


@pytest.fixture(scope="session")
def F7():
    return PrimeField(7)


@pytest.fixture(scope="session")
def Q():
    return QQ


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria (tolerance: exact)")
    for n, (ok, detail) in sorted(test_acceptance.RESULTS.items()):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
