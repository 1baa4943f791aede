import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ordlin.verify import bundled_corpus_dir, load_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    return {p.name: p for p in load_corpus(bundled_corpus_dir())}
