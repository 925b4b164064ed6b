"""One check per acceptance criterion; each prints a single pass/fail line."""

import pytest

from symcartan.golden import CRITERIA, criterion_line, run_criterion
from symcartan.tasks import Options


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion_{c.number:02d}")
def test_criterion(criterion, capsys):
    entry = run_criterion(criterion, Options())
    with capsys.disabled():
        print("\n" + criterion_line(entry))
    assert entry["ok"], entry["detail"]
