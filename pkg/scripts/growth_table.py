"""Tile counts per growth generation, with fix-up rounds and coloring statistics."""

import argparse

from scott_tiler.report import ACCEPTANCE_FAMILIES, AnalysisOptions, run_analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=2)
    args = ap.parse_args()

    opts = AnalysisOptions(growth_steps=args.steps)
    print(f"{'signature':>12}  {'tiles per generation':<28} {'fixups':>6} {'colors':>6} {'conflicts':>9}")
    for sig in ACCEPTANCE_FAMILIES:
        rep = run_analysis(*sig, opts).report
        g, c = rep.growth, rep.coloring
        print(
            f"{str(sig):>12}  {str(g['tiles']):<28} {g['fixups']:>6} "
            f"{c['colors_used']:>6} {c['max_backward_conflicts']:>9}"
        )


if __name__ == "__main__":
    main()
