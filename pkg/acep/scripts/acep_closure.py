import logging

from acep.closure import (
    DEFAULT_CHECK_BUDGET,
    DEFAULT_MAX_CONJUGATOR,
    DEFAULT_MAX_DEGREE,
    DEFAULT_MAX_FACTORS,
    closure_member_search,
    quotient_nonmember,
    subgroup_nonmember,
)
from acep.config import configure_logging, emit_report, make_parser, parse_word_list
from acep.graph import build_stallings, load_subgroup_spec

log = logging.getLogger(__name__)

parser = make_parser("Certify membership or non-membership in a normal closure.")
parser.add("--relators", type=str, required=True, help="comma-separated relators of N")
parser.add(
    "--target", type=str, action="append", required=True, help="word to test, repeatable"
)
parser.add(
    "--max-factors", type=int, default=DEFAULT_MAX_FACTORS, help="conjugates per certificate"
)
parser.add(
    "--max-conjugator",
    type=int,
    default=DEFAULT_MAX_CONJUGATOR,
    help="conjugator length of all but the last factor",
)
parser.add("--budget", type=int, default=DEFAULT_CHECK_BUDGET, help="conjugacy tests per target")
parser.add(
    "--max-degree", type=int, default=DEFAULT_MAX_DEGREE, help="largest permutation degree"
)
parser.add(
    "--in-subgroup",
    action="store_true",
    help="take the normal closure inside H rather than F; relators and targets must lie in H",
)


def main(argv=None) -> int:
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        alphabet, generators = load_subgroup_spec(args.spec)
        relators = parse_word_list(alphabet, args.relators)
        targets = [alphabet.parse_word(text) for text in args.target]
        g = build_stallings(alphabet, generators) if args.in_subgroup else None
        if g is not None:
            for word in relators + targets:
                if not g.member(word):
                    raise ValueError(f"{alphabet.format_word(word)} is not in H.")
    except (ValueError, OSError) as err:
        log.error("%s", err)
        return 1

    rank = alphabet.rank
    records = []
    for target in targets:
        positive = closure_member_search(
            target,
            relators,
            rank,
            max_factors=args.max_factors,
            max_conjugator=args.max_conjugator,
            budget=args.budget,
        )
        if g is not None:
            negative = subgroup_nonmember(
                target, relators, g, max_degree=args.max_degree, seed=args.seed
            )
        elif positive is None:
            negative = quotient_nonmember(
                target, relators, rank, max_degree=args.max_degree, seed=args.seed
            )
        else:
            negative = None
        records.append(
            {
                "target": alphabet.format_word(target),
                "positive": None if positive is None else positive.to_dict(alphabet),
                "negative": None if negative is None else negative.to_dict(alphabet),
                "resolved": positive is not None or negative is not None,
            }
        )

    emit_report(
        {
            "schema": 1,
            "relators": [alphabet.format_word(r) for r in relators],
            "level": "H" if g is not None else "F",
            "budgets": {
                "max_factors": args.max_factors,
                "max_conjugator": args.max_conjugator,
                "budget": args.budget,
                "max_degree": args.max_degree,
            },
            "targets": records,
        },
        args.outpath,
        args.json,
    )
    unresolved = sum(not r["resolved"] for r in records)
    if unresolved:
        log.warning("%d of %d targets unresolved", unresolved, len(records))
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
