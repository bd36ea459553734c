"""Render a colored line arrangement, with complete tiles and the growth polygon, as SVG."""

import argparse

from scott_tiler.render import RenderSpec, render_svg
from scott_tiler.report import AnalysisOptions, run_analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("signature", nargs=3, type=int, metavar=("P", "Q", "R"), default=[4, 5, 2])
    ap.add_argument("--radius", type=float, default=4.0)
    ap.add_argument("--out", default="arrangement.svg")
    ap.add_argument("--size", type=int, default=900)
    args = ap.parse_args()

    # growth inside the disk keeps every colored line drawable
    result = run_analysis(*args.signature, AnalysisOptions(radius=args.radius, growth="disk"))
    spec = RenderSpec(width=args.size, height=args.size, show_tiles=True)
    render_svg(result.arrangement, result.coloring, spec=spec, path=args.out)
    rep = result.report
    print(f"wrote {args.out}: {rep.family['num_lines']} lines, {rep.coloring['colors_used_all']} colors")


if __name__ == "__main__":
    main()
