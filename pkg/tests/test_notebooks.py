import subprocess
import sys
from pathlib import Path

import pytest

NOTEBOOKS = Path(__file__).resolve().parent.parent / "notebooks"


@pytest.mark.parametrize("script", sorted(p.name for p in NOTEBOOKS.glob("*.py")))
def test_notebook_runs(script):
    # one simulated second keeps the wall-clock part short
    result = subprocess.run([sys.executable, str(NOTEBOOKS / script), "1"], capture_output=True, text=True, timeout=120)
    assert result.returncode == 0, result.stderr
    assert result.stdout
