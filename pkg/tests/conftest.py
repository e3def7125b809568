import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from khoval.corpus import corpus_diagrams


@pytest.fixture(scope="session")
def corpus():
    return corpus_diagrams()
