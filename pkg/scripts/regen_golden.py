"""Rewrite the CLI golden files from tests/golden/cases.json.

Run after an intentional change to report contents, then review the diff.
"""

import io
import json
from pathlib import Path

from clawdeg.cli import run

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"


def main():
    cases = json.loads((GOLDEN / "cases.json").read_text())
    for name, argv in cases.items():
        out = io.StringIO()
        code = run(argv, stdout=out)
        (GOLDEN / f"{name}.jsonl").write_text(out.getvalue())
        print(f"{name}: exit {code}, {len(out.getvalue().splitlines())} records")


if __name__ == "__main__":
    main()
