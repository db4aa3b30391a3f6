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

"""Binary extractive labels from an abstract by greedy alignment.

At each step the unselected sentence that most increases the ROUGE-1 recall
of the selected set against the target is added.  Selection stops when no
sentence strictly increases recall or when max_select sentences are chosen.
Ties go to the lowest sentence index.  All tokens count, stopwords included.
"""
import collections
import dataclasses
import enum
import logging
from typing import Counter, Iterable, List, Sequence, Tuple

from weaksum import errors
from weaksum.corpus import Document, tokenize

logger = logging.getLogger(__name__)

DEFAULT_REFERENCE_MAX_SELECT = 3
DEFAULT_QA_MAX_SELECT = 1


class LabelSource(str, enum.Enum):
    """What the labels were aligned against."""

    REFERENCE = "reference"
    QA = "qa"


@dataclasses.dataclass(frozen=True)
class ExtractiveLabels:
    """One 0/1 label per document sentence."""

    doc_id: str
    labels: Tuple[int, ...]
    source: LabelSource = LabelSource.REFERENCE

    @property
    def selected(self) -> List[int]:
        """Indices of sentences labeled 1, in document order."""
        return [index for index, label in enumerate(self.labels) if label]


def unigram_recall(selected: Counter[str], target: Counter[str]) -> float:
    """ROUGE-1 recall of a token multiset against target, with clipping."""
    total = sum(target.values())
    if total == 0:
        return 0.0
    overlap = sum(min(count, selected[token]) for token, count in target.items())
    return overlap / total


def _counts(tokens: Iterable[str]) -> Counter[str]:
    return collections.Counter(tokens)


def greedy_selection(
    sentences: Sequence[Sequence[str]], target: Sequence[str], *, max_select: int
) -> List[int]:
    """Greedily pick sentence indices maximizing ROUGE-1 recall.

    :param sentences: Tokens of each sentence.
    :param target: Target tokens.
    :param max_select: Maximum number of sentences to pick.

    :returns: Picked indices, in pick order.
    """
    target_counts = _counts(target)
    if not target_counts:
        return []

    sentence_counts = [_counts(tokens) for tokens in sentences]
    selected: List[int] = []
    current = collections.Counter()
    best = 0.0

    while len(selected) < max_select:
        choice = None
        for index, counts in enumerate(sentence_counts):
            if index in selected:
                continue

            recall = unigram_recall(current + counts, target_counts)
            if recall > best:
                best = recall
                choice = index

        if choice is None:
            break

        selected.append(choice)
        current += sentence_counts[choice]
        logger.debug("Selected sentence %d, recall %.6f", choice, best)

    return selected


def greedy_align(
    document: Document,
    target_text: str,
    *,
    max_select: int = DEFAULT_REFERENCE_MAX_SELECT,
    source: LabelSource = LabelSource.REFERENCE,
) -> ExtractiveLabels:
    """Align target_text against document into binary extractive labels.

    :param document: Document to label.
    :param target_text: Abstract (or answer) to align.
    :param max_select: Maximum number of sentences labeled 1.
    :param source: Recorded label source.

    :returns: Labels, all zero when target_text has no tokens.

    :raises AlignmentError: If max_select is less than 1.
    """
    if max_select < 1:
        raise errors.AlignmentError(
            brief=f"Invalid max_select {max_select}; must be at least 1."
        )

    picked = greedy_selection(
        [sentence.tokens for sentence in document.sentences],
        tokenize(target_text),
        max_select=max_select,
    )
    labels = [0] * len(document)
    for index in picked:
        labels[index] = 1

    return ExtractiveLabels(doc_id=document.id, labels=tuple(labels), source=source)


def qa_labels(
    document: Document,
    answer_text: str,
    *,
    max_select: int = DEFAULT_QA_MAX_SELECT,
) -> ExtractiveLabels:
    """Label the sentence(s) a QA answer was taken from.

    An answer is a segment of the context, so a single sentence is selected
    by default.
    """
    return greedy_align(
        document, answer_text, max_select=max_select, source=LabelSource.QA
    )
