import logging

from acep.analysis import metric_report
from acep.config import configure_logging, emit_report, make_parser, parse_word_list
from acep.graph import build_stallings, load_subgroup_spec

log = logging.getLogger(__name__)

parser = make_parser("Evaluate |w|_H and the constants C and C_H.")
parser.add("--words", type=str, default="", help="comma-separated words to measure")


def main(argv=None) -> int:
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        alphabet, generators = load_subgroup_spec(args.spec)
        words = parse_word_list(alphabet, args.words)
    except (ValueError, OSError) as err:
        log.error("%s", err)
        return 1

    g = build_stallings(alphabet, generators)
    emit_report(metric_report(g, words), args.outpath, args.json)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
