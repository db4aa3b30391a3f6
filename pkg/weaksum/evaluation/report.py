# Copyright 2021 Canonical Ltd.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3 as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

"""Corpus evaluation and ablation reports."""
import dataclasses
import logging
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from weaksum import errors
from weaksum.corpus import tokenize

from .errors import EvaluationError
from .rouge import rouge_l, rouge_n

logger = logging.getLogger(__name__)

METRICS = ("rouge1", "rouge2", "rougeL")
_HEADERS = ("System", "Mode", "ROUGE-1", "ROUGE-2", "ROUGE-L", "N")


@dataclasses.dataclass(frozen=True)
class ReportRow:
    """Mean ROUGE F1 of one system over a corpus."""

    system_name: str
    mode: str
    rouge1: float
    rouge2: float
    rougeL: float
    instance_count: int

    def __post_init__(self) -> None:
        if self.instance_count <= 0:
            raise EvaluationError(
                brief=f"Report row {self.system_name!r} has no instances."
            )

    def marshal(self) -> Dict[str, Any]:
        """Create a JSON-serializable dictionary."""
        return {
            "system": self.system_name,
            "mode": self.mode,
            "r1": self.rouge1,
            "r2": self.rouge2,
            "rl": self.rougeL,
            "n": self.instance_count,
        }

    @classmethod
    def unmarshal(cls, data: Dict[str, Any]) -> "ReportRow":
        """Create a ReportRow from marshalled data."""
        return cls(
            system_name=data["system"],
            mode=data["mode"],
            rouge1=float(data["r1"]),
            rouge2=float(data["r2"]),
            rougeL=float(data["rl"]),
            instance_count=int(data["n"]),
        )


@dataclasses.dataclass(frozen=True)
class AblationReport:
    """Rendered report: a fixed-width table and its JSON document."""

    rows: Tuple[ReportRow, ...]
    text: str
    data: Dict[str, Any]


def evaluate_corpus(
    summaries: Sequence[Tuple[str, str, str]],
    references: Sequence[Tuple[str, str, str]],
    mode: str,
    *,
    system_name: str = "system",
) -> ReportRow:
    """Score (id, topic, candidate) summaries against (id, topic, reference).

    :param summaries: Candidate summaries.
    :param references: References, keyed by (id, topic).
    :param mode: Budget mode the summaries were produced with.
    :param system_name: Row name.

    :returns: Unweighted mean F1 of each metric.

    :raises EvaluationError: If a summary has no reference, or there are no
        summaries.
    """
    by_key = {(doc_id, topic): text for doc_id, topic, text in references}
    missing = [
        (doc_id, topic)
        for doc_id, topic, _ in summaries
        if (doc_id, topic) not in by_key
    ]
    if missing:
        raise EvaluationError(
            brief=f"{len(missing)} summaries of {system_name!r} have no reference.",
            details=errors.details_from_missing_keys(missing),
        )

    if not summaries:
        raise EvaluationError(brief=f"No summaries to evaluate for {system_name!r}.")

    scores = np.zeros((len(summaries), len(METRICS)), dtype=np.float64)
    for row, (doc_id, topic, candidate) in enumerate(summaries):
        candidate_tokens = tokenize(candidate)
        reference_tokens = tokenize(by_key[(doc_id, topic)])
        scores[row] = (
            rouge_n(candidate_tokens, reference_tokens, 1).f1,
            rouge_n(candidate_tokens, reference_tokens, 2).f1,
            rouge_l(candidate_tokens, reference_tokens).f1,
        )

    means = [float(value) for value in scores.mean(axis=0)]
    logger.debug("Evaluated %d summaries of %s", len(summaries), system_name)
    return ReportRow(
        system_name=system_name,
        mode=mode,
        rouge1=means[0],
        rouge2=means[1],
        rougeL=means[2],
        instance_count=len(summaries),
    )


def _maxima(rows: Sequence[ReportRow]) -> Dict[Tuple[str, str], float]:
    maxima: Dict[Tuple[str, str], float] = {}
    for row in rows:
        for metric in METRICS:
            key = (row.mode, metric)
            maxima[key] = max(maxima.get(key, -1.0), getattr(row, metric))
    return maxima


def render_table(rows: Sequence[ReportRow]) -> str:
    """Render rows as a fixed-width table.

    F1 is shown as a percentage.  The best value of each metric within a
    budget mode is marked with double asterisks.
    """
    maxima = _maxima(rows)
    cells: List[Tuple[str, ...]] = [_HEADERS]

    for row in rows:
        metrics = []
        for metric in METRICS:
            value = getattr(row, metric)
            text = f"{100 * value:.2f}"
            if value == maxima[(row.mode, metric)]:
                text = f"**{text}**"
            metrics.append(text)
        cells.append((row.system_name, row.mode, *metrics, str(row.instance_count)))

    widths = [
        max(len(line[column]) for line in cells) for column in range(len(_HEADERS))
    ]
    lines = []
    for line in cells:
        left = [line[column].ljust(widths[column]) for column in range(2)]
        right = [line[column].rjust(widths[column]) for column in range(2, len(line))]
        lines.append("  ".join(left + right).rstrip())

    return "\n".join(lines) + "\n"


def report_json(rows: Sequence[ReportRow]) -> Dict[str, Any]:
    """Machine-readable report document."""
    return {"rows": [row.marshal() for row in rows]}


def rows_from_json(data: Dict[str, Any]) -> List[ReportRow]:
    """Parse the rows of a report document."""
    return [ReportRow.unmarshal(item) for item in data["rows"]]


def ablation_report(rows: Sequence[ReportRow]) -> AblationReport:
    """Build the text and JSON report of rows, in the given order.

    :raises EvaluationError: If rows is empty.
    """
    if not rows:
        raise EvaluationError(brief="Cannot build a report without rows.")

    return AblationReport(
        rows=tuple(rows), text=render_table(rows), data=report_json(rows)
    )
