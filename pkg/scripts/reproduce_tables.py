#!/usr/bin/env python3
"""Recompute the summary tables and write a Markdown and a JSON report."""
import argparse
import json
import sys
from pathlib import Path

from vsr_finsler.tables import reproduce_tables, tables_ok, to_markdown


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="reports")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    rows = reproduce_tables()
    (out / "tables.md").write_text(to_markdown(rows) + "\n")
    doc = {"ok": tables_ok(rows), "rows": [r.to_json() for r in rows]}
    (out / "tables.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    counts = {}
    for r in rows:
        counts[r.status] = counts.get(r.status, 0) + 1
    print(f"{len(rows)} rows: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
    print(f"wrote {out / 'tables.md'} and {out / 'tables.json'}")
    return 0 if doc["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
