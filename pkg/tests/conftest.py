import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from answerrank import _pykernel, textnorm
from answerrank.types import Passage, RankedList

try:
    from answerrank import _ckernel
except ImportError:  # extension not built
    _ckernel = None

KERNELS = [pytest.param(_pykernel, id="python")]
if _ckernel is not None:
    KERNELS.append(pytest.param(_ckernel, id="c"))


@pytest.fixture(params=KERNELS)
def backend(request, monkeypatch):
    """Run the test once per available kernel."""
    monkeypatch.setattr(textnorm, "kernel", request.param)
    return request.param


def make_list(qid, texts, ids=None):
    ids = ids or [f"{qid}-{i}" for i in range(len(texts))]
    return RankedList.from_passages(qid, [Passage(pid, t) for pid, t in zip(ids, texts)])


@pytest.fixture
def fixtures_dir():
    return Path(__file__).parent / "data"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
