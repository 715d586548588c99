"""Aggregates the pipeline graph -> fiber -> sdetect -> metric into one report."""
from dataclasses import dataclass, field
import logging
from typing import Iterable, Optional, Sequence, Tuple

from acep.fiber import CaseLabel, Classification, Verdict, classify
from acep.graph import StallingsGraph, build_stallings
from acep.metric import Constants, constants, metric_for
from acep.sdetect import SResult, SStatus, is_s_subgroup, verify_witness
from acep.words import Alphabet, Letter, Word, reduce

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def decide_verdict(classification: Classification, s_result: Optional[SResult]) -> Verdict:
    """Case 1 has ACEP; cases 2 and 3, and S-subgroups, do not; anything else
    is undetermined."""
    if classification.case is CaseLabel.MALNORMAL:
        return Verdict.HAS_ACEP
    if classification.case in (CaseLabel.NON_CYCLONORMAL, CaseLabel.CYCLIC_NON_POWER):
        return Verdict.NO_ACEP
    if s_result is not None and s_result.status is SStatus.YES:
        return Verdict.NO_ACEP
    return Verdict.UNDETERMINED


@dataclass(frozen=True)
class AnalysisReport:
    alphabet: Alphabet
    generators: Tuple[Word, ...]
    classification: Classification
    s_result: SResult
    constants: Optional[Constants]
    verdict: Verdict
    graph: StallingsGraph = field(compare=False, repr=False)

    def to_dict(self) -> dict:
        fmt = self.alphabet.format_word
        witness = self.s_result.witness
        document = {
            "schema": SCHEMA_VERSION,
            "input": {
                "alphabet": list(self.alphabet.names),
                "generators": [fmt(w) for w in self.generators],
            },
            "graph": {
                "vertices": self.graph.n_vertices,
                "edges": self.graph.n_edges,
                "rank": self.graph.rank,
            },
            "classification": {
                "case": self.classification.case.value,
                "name": self.classification.case.name.lower(),
                "witnesses": [
                    {
                        "anchor": list(c.anchor),
                        "rank": c.rank,
                        "generator": None
                        if c.generator is None
                        else fmt(c.generator.representative),
                    }
                    for c in self.classification.witnesses
                ],
            },
            "s_subgroup": {
                "status": self.s_result.status.value,
                "bound": self.s_result.bound,
                "exact": self.s_result.exact,
                "witness": None
                if witness is None
                else {
                    "w": fmt(witness.w),
                    "a": fmt(witness.a),
                    "verified": verify_witness(self.graph, witness.w, witness.a),
                },
            },
            "constants": None if self.constants is None else self.constants.to_dict(),
            "verdict": self.verdict.value,
        }
        return document


def analyze(
    alphabet: Alphabet,
    generators: Iterable[Sequence[Letter]],
    s_bound: Optional[int] = None,
    skip_metric: bool = False,
) -> AnalysisReport:
    """Runs the full analysis of ``H = ⟨generators⟩``.

    Parameters
    ----------
    alphabet : Alphabet
    generators : iterable of words
    s_bound : int, optional
        Cycle-length bound for the S-subgroup search; default chosen from the
        graph.
    skip_metric : bool, optional
        Skip the constants ``C`` and ``C_H``.
    """
    generators = tuple(reduce(w) for w in generators)
    g = build_stallings(alphabet, generators)
    classification = classify(g)
    s_result = is_s_subgroup(g, bound=s_bound)
    consts = None if skip_metric else constants(g)
    verdict = decide_verdict(classification, s_result)
    log.info("Verdict: %s", verdict.value)
    return AnalysisReport(alphabet, generators, classification, s_result, consts, verdict, g)


def metric_report(g: StallingsGraph, words: Iterable[Sequence[Letter]]) -> dict:
    """Per-word ``|w|`` and ``|w|_H`` with the size of the deciding ball, plus
    the constants of ``H``."""
    metric = metric_for(g)
    fmt = g.alphabet.format_word
    records = []
    for word in words:
        word = reduce(word)
        length = metric.length(word)
        states = metric.ball(length).n_states if length >= 1 and len(metric.family) else None
        records.append(
            {"word": fmt(word), "length": len(word), "h_length": length, "ball_states": states}
        )
    return {
        "schema": SCHEMA_VERSION,
        "constants": constants(g).to_dict(),
        "omega": len(metric.family),
        "words": records,
    }
