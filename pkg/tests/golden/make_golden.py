"""Regenerate the golden CSV digests: python3 tests/golden/make_golden.py"""

import hashlib
import json
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE.parent))

from figure_sets import BAND_TABLES, CONDITION, FULL_TABLE, argv_for  # noqa: E402
from ptcomb.cli import run  # noqa: E402


def main():
    digests = {}
    with tempfile.TemporaryDirectory() as tmp:
        for name in list(CONDITION) + list(BAND_TABLES):
            out = Path(tmp) / f"{name}.csv"
            assert run(argv_for(name) + ["--out", str(out)]) == 0
            data = out.read_bytes()
            digests[name] = {"argv": argv_for(name), "sha256": hashlib.sha256(data).hexdigest()}
            if name == FULL_TABLE:
                (HERE / f"{name}_band_table.csv").write_bytes(data)
    (HERE / "figures.json").write_text(json.dumps(digests, indent=1) + "\n")


if __name__ == "__main__":
    main()
