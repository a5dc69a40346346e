import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("script, args", [
    ("tier_sweep.py", ["--budgets", "4096", "--out-dir", "{tmp}"]),
    ("mac_sweep.py", ["--n", "64", "--k", "1024", "--out", "{tmp}/m.csv"]),
    ("tier_study.py", ["--n", "20", "--out", "{tmp}/t.csv"]),
    ("area_performance.py", ["--macs", "4096", "--out", "{tmp}/a.csv"]),
])
def test_script_runs(script, args, tmp_path):
    argv = [a.replace("{tmp}", str(tmp_path)) for a in args]
    proc = subprocess.run([sys.executable, str(SCRIPTS / script), *argv], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert any(tmp_path.iterdir())
