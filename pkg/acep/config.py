import json
import logging
from pathlib import Path
from typing import List, Optional

import configargparse

from acep.words import Alphabet, Word

log = logging.getLogger(__name__)

DEFAULT_OUTPATH = "."


def make_parser(description: str) -> configargparse.ArgParser:
    """Parser with the options shared by every script."""
    parser = configargparse.ArgParser(description=description)

    parser.add("-c", "--config", is_config_file=True, help="path to config file")
    parser.add(
        "spec", type=str, help="path to a JSON subgroup spec with 'alphabet' and 'generators'"
    )
    parser.add(
        "-o", "--outpath", type=str, default=DEFAULT_OUTPATH, help="path to output files"
    )
    parser.add("--json", type=str, default=None, help="write the report here instead of stdout")
    parser.add("--seed", type=int, default=None, help="provide integer seed for reproducibility")
    parser.add("-v", "--verbose", action="count", default=0, help="more logging, repeatable")
    return parser


def configure_logging(verbose: int):
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def parse_word_list(alphabet: Alphabet, text: str) -> List[Word]:
    """Parses comma-separated words, e.g. ``"xx,XyxY"``."""
    return [alphabet.parse_word(item) for item in text.split(",") if item.strip()]


def emit_report(document: dict, outpath: str, filename: Optional[str]):
    """Writes ``document`` as JSON to ``outpath/filename``, or to stdout."""
    text = json.dumps(document, indent=2, ensure_ascii=False)
    if filename is None:
        print(text)
        return
    path = Path(outpath) / filename
    if path.is_file():
        log.warning(f"Existing report found at '{path.resolve()}'. This will be overwritten.")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")
