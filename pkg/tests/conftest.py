import json
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))  # helpers and the reference featurizer

from helpers import FIXTURES, fixture_config  # noqa: E402
from farsent.evaluation import load_corpus  # noqa: E402
from farsent.lexicon import Scheme, load_lexicon  # noqa: E402
from farsent.pipeline import build, featurize  # noqa: E402


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def lexicons():
    return (load_lexicon(FIXTURES / "lex_triple.tsv", Scheme.TRIPLE),
            load_lexicon(FIXTURES / "lex_scalar.tsv", Scheme.SCALAR),
            load_lexicon(FIXTURES / "lex_label.tsv", Scheme.LABEL))


@pytest.fixture(scope="session")
def resources():
    return build(fixture_config())


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(FIXTURES / "corpus.jsonl")


@pytest.fixture(scope="session")
def feature_set(corpus, resources):
    return featurize(corpus, resources)


@pytest.fixture(scope="session")
def golden() -> dict:
    return json.loads((FIXTURES / "golden.json").read_text(encoding="utf-8"))



CRITERIA: list[tuple[int, str, bool, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): release criterion checked by the test")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.call_passed = rep.passed
    return rep


@pytest.fixture
def criterion(request):
    """Time the test body; the outcome lands in the acceptance summary.
    Call the yielded function with a runtime limit in seconds."""
    n, title = request.node.get_closest_marker("criterion").args
    t0 = time.perf_counter()

    def check_runtime(limit=None):
        elapsed = time.perf_counter() - t0
        assert limit is None or elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"

    yield check_runtime
    CRITERIA.append((n, title, getattr(request.node, "call_passed", False), time.perf_counter() - t0))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, elapsed in sorted(CRITERIA):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f} s)")
