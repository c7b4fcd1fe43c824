import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


@pytest.mark.parametrize("name, args, produced", [
    ("equilibrium_regimes.py", ["--gammas", "0", "5"], "summary.csv"),
    ("strong_dephasing.py", ["--gammas", "100"], "strong_dephasing.csv"),
    ("relaxation_sweep.py", ["--points", "8"], "relaxation_sweep.csv"),
    ("trap_ensemble.py", ["--p", "0.5", "--realizations", "2"], "ensemble_p0.5.csv"),
])
def test_script_runs(tmp_path, name, args, produced):
    proc = subprocess.run([sys.executable, str(SCRIPTS / name), "--out", str(tmp_path), *args],
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / produced).exists()
