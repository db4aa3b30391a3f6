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

"""ROUGE-N and ROUGE-L over weaksum tokens.

No stemming and no stopword removal: scores are comparable between runs of
this package only.
"""
import collections
import dataclasses
from typing import Counter, Sequence, Tuple

from .errors import EvaluationError


@dataclasses.dataclass(frozen=True)
class RougeScore:
    """Precision, recall and F1 of one candidate against one reference."""

    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(
        cls, *, overlap: int, candidate_total: int, reference_total: int
    ) -> "RougeScore":
        """Score from a match count and the two totals.

        A component with a zero denominator is 0.
        """
        precision = overlap / candidate_total if candidate_total else 0.0
        recall = overlap / reference_total if reference_total else 0.0
        if precision + recall == 0.0:
            return cls(precision=precision, recall=recall, f1=0.0)
        f1 = 2 * precision * recall / (precision + recall)
        return cls(precision=precision, recall=recall, f1=f1)


def ngrams(tokens: Sequence[str], n: int) -> Counter[Tuple[str, ...]]:
    """Count the n-grams of tokens."""
    return collections.Counter(
        tuple(tokens[start : start + n]) for start in range(len(tokens) - n + 1)
    )


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """ROUGE-N with clipped n-gram counts.

    :raises EvaluationError: If n is less than 1.
    """
    if n < 1:
        raise EvaluationError(brief=f"Invalid ROUGE order {n}; must be at least 1.")

    candidate_grams = ngrams(candidate, n)
    reference_grams = ngrams(reference, n)
    overlap = sum((candidate_grams & reference_grams).values())

    return RougeScore.from_counts(
        overlap=overlap,
        candidate_total=sum(candidate_grams.values()),
        reference_total=sum(reference_grams.values()),
    )


def lcs_length(first: Sequence[str], second: Sequence[str]) -> int:
    """Length of the longest common subsequence."""
    if not first or not second:
        return 0

    previous = [0] * (len(second) + 1)
    for item in first:
        current = [0]
        for position, other in enumerate(second):
            if item == other:
                current.append(previous[position] + 1)
            else:
                current.append(max(previous[position + 1], current[position]))
        previous = current

    return previous[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Sentence-level ROUGE-L (F1 with beta = 1)."""
    return RougeScore.from_counts(
        overlap=lcs_length(candidate, reference),
        candidate_total=len(candidate),
        reference_total=len(reference),
    )
