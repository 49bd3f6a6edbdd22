"""
Batch verification runs
=======================

The ``ale`` command line tool driven from Python: a full run, a restricted run
from a configuration, and an injected failure.
"""

import json
import tempfile
from pathlib import Path

from aletwistor import cli

# %%
# A restricted run from a configuration string.
cfg = cli.parse_config('{"only": ["picard", "nodal"], "nodal": {"ell": [2]}}')
report = cli.verify_all(cfg)
print("pass:", report.passed, "checks:", len(report.checks))
for row in report.data["picard"]["theorem"][-3:]:
    print(row["type"], row["Q2"], row["KQ"])

# %%
# The same through main(); exit code 0 means every check passed.
with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "report.json"
    code = cli.main(["verify-all", "--out", str(out)])
    rep = json.loads(out.read_text())
    print("exit", code, "sections", list(rep["data"]), "checks", len(rep["checks"]))

    # an impossible tolerance makes numeric checks fail: exit code 1
    print("exit", cli.main(["verify-all", "--only", "aklines", "--tol", "1e-300", "--out", str(out)]))
