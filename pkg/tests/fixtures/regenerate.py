"""Rewrite the golden reports from the current implementation.

Run from the repository root after an intentional output change:

    python3 tests/fixtures/regenerate.py
"""

import json
import sys
from pathlib import Path

from modumap.cli import main

ROOT = Path(__file__).resolve().parent


def main_regen() -> int:
    for case in json.loads((ROOT / "cases.json").read_text()):
        out = ROOT / "golden" / f"{case['name']}.json"
        code = main(["compile", str(ROOT / "circuits" / f"{case['circuit']}.qasm"),
                     str(ROOT / "configs" / f"{case['config']}.json"),
                     "--mode", case["mode"], "--out", str(out)])
        if code != 0:
            print(f"{case['name']}: exit {code}", file=sys.stderr)
            return code
        print(f"wrote {out.relative_to(ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main_regen())
