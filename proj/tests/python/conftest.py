"""Make the in-tree package and the built extension importable.

Wheel installs need neither path; development builds keep the package
under python/ and the extension under <build>/python/.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]

sys.path.insert(0, str(ROOT / "python"))
for ext_dir in sorted(ROOT.glob("build*/python")):
    sys.path.insert(0, str(ext_dir))
