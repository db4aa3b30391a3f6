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

"""Ranking sentences and cutting budget-constrained summaries."""
import collections
import enum
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from weaksum.alignment import ExtractiveLabels, unigram_recall
from weaksum.corpus import Document, TopicInstance, surface_tokens, tokenize
from weaksum.evaluation import rouge_n
from weaksum.signals import SignalMatrix

from .features import featurize
from .model import LinearScorer, predict

logger = logging.getLogger(__name__)

WORD_BUDGET = 20


class BudgetMode(str, enum.Enum):
    """Summary length constraint."""

    ONE_SENTENCE = "one_sentence"
    TWENTY_WORDS = "twenty_words"


def rank_scores(scores: Sequence[float]) -> List[int]:
    """Indices by descending score, lower index first on ties."""
    return sorted(range(len(scores)), key=lambda index: (-scores[index], index))


def rank(
    scorer: LinearScorer,
    document: Document,
    topic: TopicInstance,
    matrix: SignalMatrix,
) -> List[int]:
    """Rank the sentences of document by predicted probability."""
    probabilities = predict(scorer, featurize(document, topic, matrix))
    return rank_scores([float(value) for value in probabilities])


def random_ranking(document: Document, seed: int) -> List[int]:
    """A uniformly random ranking, reproducible for a seed."""
    rng = np.random.default_rng(seed)
    return [int(index) for index in rng.permutation(len(document))]


def select_summary(
    ranking: Sequence[int],
    document: Document,
    mode: BudgetMode,
    *,
    budget: int = WORD_BUDGET,
) -> str:
    """Cut a summary out of document following ranking.

    In one sentence mode the top-ranked sentence is returned verbatim.  In
    twenty words mode sentences are taken in rank order until the budget is
    reached, the last one taken is truncated to land exactly on the budget,
    and the sentences are joined in document order.
    """
    mode = BudgetMode(mode)
    if mode == BudgetMode.ONE_SENTENCE:
        return document.sentences[ranking[0]].text

    taken: Dict[int, int] = {}
    total = 0
    for index in ranking:
        if total >= budget:
            break
        count = len(document.sentences[index].tokens)
        taken[index] = min(count, budget - total)
        total += taken[index]

    parts = []
    for index in sorted(taken):
        sentence = document.sentences[index]
        if taken[index] == len(sentence.tokens):
            parts.append(sentence.text)
        else:
            parts.append(" ".join(surface_tokens(sentence.text)[: taken[index]]))

    return " ".join(parts)


def _recall_ranking(document: Document, reference_tokens: Sequence[str]) -> List[int]:
    target = collections.Counter(reference_tokens)
    return rank_scores(
        [
            unigram_recall(collections.Counter(sentence.tokens), target)
            for sentence in document.sentences
        ]
    )


def oracle_summary(
    document: Document,
    labels: ExtractiveLabels,
    mode: BudgetMode,
    reference_text: Optional[str] = None,
) -> str:
    """Summary selected directly from extractive labels.

    Labeled sentences, in document order, lead the ranking.  In one sentence
    mode the labeled sentence with the best ROUGE-1 F1 against the reference
    is chosen.  Without any labeled sentence, sentences are ranked by their
    own ROUGE-1 recall against the reference.
    """
    mode = BudgetMode(mode)
    reference_tokens = tokenize(reference_text or "")
    selected = labels.selected

    if not selected:
        logger.debug("No extractive label for %r, ranking by recall", document.id)
        ranking = _recall_ranking(document, reference_tokens)
        return select_summary(ranking, document, mode)

    if mode == BudgetMode.ONE_SENTENCE:
        scores = [
            rouge_n(document.sentences[index].tokens, reference_tokens, 1).f1
            for index in selected
        ]
        best = selected[rank_scores(scores)[0]]
        return document.sentences[best].text

    rest = [index for index in range(len(document)) if index not in selected]
    return select_summary([*selected, *rest], document, mode)
