import logging
from pathlib import Path

import matplotlib.pyplot as plt

from acep.analysis import analyze
from acep.config import configure_logging, emit_report, make_parser
from acep.fiber import product
from acep.graph import load_subgroup_spec
from acep.sdetect import SStatus
from acep.visualize import draw_graph

log = logging.getLogger(__name__)

parser = make_parser("Classify a subgroup of a free group and decide the S-property.")
parser.add("--dot", type=str, default=None, help="directory for Graphviz DOT files")
parser.add("--s-bound", type=int, default=None, help="cycle-length bound for the S-search")
parser.add("--skip-metric", action="store_true", help="do not compute C and C_H")
parser.add("--plot", action="store_true", help="save a drawing of the Stallings graph")

PLOT_FNAME = "stallings.png"


def write_dot(report, directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    g = report.graph
    core = g.core()
    files = {
        "stallings.dot": g.to_dot(name="Stallings"),
        "core.dot": core.to_dot(name="Core"),
        "product.dot": product(core, remove_diagonal=True).to_dot(name="Product"),
    }
    for name, text in files.items():
        (directory / name).write_text(text)
    log.info(f"Wrote {len(files)} DOT files to '{directory.resolve()}'")


def main(argv=None) -> int:
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        alphabet, generators = load_subgroup_spec(args.spec)
        report = analyze(
            alphabet, generators, s_bound=args.s_bound, skip_metric=args.skip_metric
        )
    except (ValueError, OSError) as err:
        log.error("%s", err)
        return 1

    if args.dot is not None:
        write_dot(report, Path(args.dot))
    if args.plot:
        outpath = Path(args.outpath)
        outpath.mkdir(parents=True, exist_ok=True)
        ax = draw_graph(report.graph)
        ax.figure.savefig(outpath / PLOT_FNAME)
        plt.close(ax.figure)

    emit_report(report.to_dict(), args.outpath, args.json)
    return 2 if report.s_result.status is SStatus.UNKNOWN else 0


if __name__ == "__main__":
    raise SystemExit(main())
