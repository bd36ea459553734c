"""Algebra checks on every small signature and full analyses of the standard families."""

import argparse
import json

from scott_tiler.report import ACCEPTANCE_FAMILIES, algebra_checks, run_analysis, signature_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-index", type=int, default=9)
    ap.add_argument("--out", help="write the summary as JSON")
    args = ap.parse_args()

    rows = [algebra_checks(*s) for s in signature_grid(args.max_index)]
    bad = [r["signature"] for r in rows if not (r["infinite_order"] and r["relations_ok"] and r["oracle_ok"])]
    print(f"{len(rows)} signatures, algebra failures: {bad or 'none'}")

    summary = []
    print(f"{'signature':>12} {'case':>9} {'lines':>6} {'tiles':>6} {'gens':>5} {'colors':>7}  ok")
    for sig in ACCEPTANCE_FAMILIES:
        rep = run_analysis(*sig).report
        summary.append({"signature": list(sig), "ok": rep.ok, "checks": rep.checks})
        col = f"{rep.coloring['colors_used']}/{rep.coloring['bound']}"
        print(
            f"{str(sig):>12} {rep.signature['case_label']:>9} {rep.family['num_lines']:>6} "
            f"{rep.census['complete_tiles']:>6} {rep.growth['generations']:>5} {col:>7}  {rep.ok}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"algebra_failures": bad, "families": summary}, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
