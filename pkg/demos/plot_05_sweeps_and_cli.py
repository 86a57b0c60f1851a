"""
Figure sweeps and the command line
==================================

Produce the sweep tables for the two worked families, first through the
library and then through the ``incompat`` command.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from incompat.cli import run_sweep, sweep_csv
from incompat.io import write_device
from incompat.objects import example_unbiased_qubit_povm, identity_channel

# unbiased family: closed-form bounds next to the SDP robustness value
cols, rows = run_sweep("unbiased-eta", 0.0, 1.0, 6)
print(sweep_csv(cols, rows))

# sixfold family with the effect norms
cols, rows = run_sweep("sixfold-p", 0.0, 1.0, 6, ("p", "rom", "bound_corollary", "bound_hm", "effect_norm"))
print(sweep_csv(cols, rows))

# the same machinery from the shell, on device files
tmp = Path(tempfile.mkdtemp())
write_device(identity_channel(2), tmp / "id.json")
write_device(example_unbiased_qubit_povm(0.5), tmp / "z.json")
for argv in (["roi", "channel-povm", str(tmp / "id.json"), str(tmp / "z.json")],
             ["verify", "prop3", str(tmp / "z.json")],
             ["sweep", "unbiased-eta", "--steps", "3", "--columns", "eta,bound_corollary,bound_hm"]):
    out = subprocess.run([sys.executable, "-m", "incompat", *argv], capture_output=True, text=True)
    print("$ incompat", " ".join(argv[:2]), "->", out.returncode)
    print(out.stdout)
