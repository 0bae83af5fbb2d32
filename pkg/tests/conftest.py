import pytest

from astroturf.ingest import Store
from astroturf.synth import SynthConfig, generate


@pytest.fixture(scope="session")
def small_corpus():
    return generate(SynthConfig(n_humans=60, n_bots=20, span_days=8, seed=3,
                                n_trolls=6, n_renamed=2))


@pytest.fixture(scope="session")
def small_store(small_corpus):
    return Store.from_tweets(small_corpus.tweets)


ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line, then fail the test if the check failed."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
