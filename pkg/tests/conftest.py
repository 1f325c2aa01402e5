import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from axialorbits import IntegratorConfig, default_grid_specs, run_survey


@pytest.fixture(scope="session")
def default_survey():
    """The full default-grid survey at acceptance settings, run once per
    session. Returns (rows, wall_seconds)."""
    t0 = time.perf_counter()
    rows = run_survey(default_grid_specs(), IntegratorConfig())
    elapsed = time.perf_counter() - t0
    return rows, elapsed
