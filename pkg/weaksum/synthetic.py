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

"""Synthetic topic corpus for directional experiments.

Each generated document is a handful of templated news sentences.  Exactly
one of them (the planted sentence) mentions the document's topic, an
organisation name such as "Geneva Bank".  The reference summary paraphrases
the planted sentence and the QA answer is a fragment of it, so a system that
finds the topic-relevant sentence scores well above random selection.
"""
import dataclasses
import logging
import pathlib
from typing import Any, Dict, NamedTuple, Sequence, Tuple

import numpy as np

from weaksum import jsonl
from weaksum.corpus.text import tokenize

logger = logging.getLogger(__name__)

DEFAULT_NUM_DOCS = 200
DEFAULT_DIM = 16
MIN_SENTENCES = 6
MAX_SENTENCES = 9

_PLACES = (
    "City",
    "Bank",
    "Council",
    "Museum",
    "Airport",
    "Hospital",
    "Group",
    "United",
)
_NAMES = (
    "Geneva",
    "Porto",
    "Atlanta",
    "Sydney",
    "Lagos",
    "Denver",
    "Kyoto",
    "Madrid",
    "Boston",
    "Nairobi",
    "Oslo",
    "Manchester",
)

_VERBS = tuple("approved rejected announced delayed expanded reviewed funded".split())
_ADJECTIVES = tuple("controversial ambitious costly popular regional historic".split())
_NOUNS = tuple("budget stadium vaccine railway merger festival bridge campus".split())
_TIMES = (
    "on the weekend",
    "last week",
    "this morning",
    "overnight",
    "after a long debate",
)

_FILLERS = {
    "place": ("harbour", "market", "library", "station", "park", "town square"),
    "issue": ("housing costs", "water quality", "noise levels", "parking fees"),
    "group": ("students", "pensioners", "commuters", "families", "shop owners"),
    "weather": ("heavy rain", "strong winds", "dense fog", "a heatwave"),
    "trend": ("higher", "lower", "steady", "unusual"),
    "event": ("holiday weekend", "street fair", "charity run", "night market"),
    "time": _TIMES,
}

_DISTRACTORS = (
    "Residents gathered near the {place} to discuss {issue} {time}.",
    "Analysts expect {issue} to remain a concern for {group}.",
    "Weather forecasters predicted {weather} across the {place} {time}.",
    "Local shops reported {trend} sales during the {event}.",
    "Several {group} volunteered at the {event} {time}.",
    "Traffic around the {place} slowed because of {weather}.",
    "Nurses near the {place} welcomed {group} for the {event}.",
    "Critics argued that {issue} deserved more attention from {group}.",
    "Photos of the {event} were shared widely by {group}.",
)

_OTHER_ENTITY = "A spokesperson for {other} declined to comment {time}."


class SyntheticPaths(NamedTuple):
    """Files written by :func:`write_corpus`."""

    corpus: pathlib.Path
    qa_answers: pathlib.Path
    embeddings: pathlib.Path
    config: pathlib.Path


@dataclasses.dataclass(frozen=True)
class SyntheticCorpus:
    """Generated corpus records, QA answers and vocabulary."""

    records: Tuple[Dict[str, str], ...]
    answers: Tuple[Dict[str, str], ...]
    vocabulary: Tuple[str, ...]


def _pick(rng: np.random.Generator, options: Sequence[Any]) -> Any:
    return options[int(rng.integers(len(options)))]


def _entity(rng: np.random.Generator) -> Tuple[str, str]:
    return _pick(rng, _NAMES), _pick(rng, _PLACES)


def _fill(rng: np.random.Generator, template: str) -> str:
    values = {key: _pick(rng, options) for key, options in _FILLERS.items()}
    return template.format(**values)


def _document(
    rng: np.random.Generator, doc_id: str
) -> Tuple[Dict[str, str], Dict[str, str]]:
    name, place = _entity(rng)
    topic = f"{name} {place}"

    other_name, other_place = _entity(rng)
    while other_name == name or other_place == place:
        other_name, other_place = _entity(rng)
    other = f"{other_name} {other_place}"

    verb = _pick(rng, _VERBS)
    adjective = _pick(rng, _ADJECTIVES)
    noun = _pick(rng, _NOUNS)

    count = int(rng.integers(MIN_SENTENCES, MAX_SENTENCES + 1))
    templates = [
        _DISTRACTORS[index]
        for index in rng.permutation(len(_DISTRACTORS))[: count - 2]
    ]
    sentences = [_fill(rng, template) for template in templates]
    sentences.insert(
        int(rng.integers(len(sentences) + 1)),
        _fill(rng, _OTHER_ENTITY.replace("{other}", other)),
    )

    planted = (
        f"Officials confirmed that {topic} {verb} the {adjective} {noun} plan "
        f"{_pick(rng, _TIMES)}."
    )
    sentences.insert(int(rng.integers(len(sentences) + 1)), planted)

    record = {
        "id": doc_id,
        "document": " ".join(sentences),
        "reference": f"{topic} {verb} {adjective} {noun} plan, officials said.",
        "topic": topic,
    }
    answer = {
        "id": doc_id,
        "topic": topic,
        "answer": f"{topic} {verb} the {adjective} {noun} plan",
    }
    return record, answer


def generate(num_docs: int = DEFAULT_NUM_DOCS, seed: int = 0) -> SyntheticCorpus:
    """Generate a synthetic corpus.

    :param num_docs: Number of documents.
    :param seed: Random seed; equal seeds give equal corpora.

    :raises ValueError: If num_docs is less than 1.
    """
    if num_docs < 1:
        raise ValueError("num_docs must be at least 1")

    rng = np.random.default_rng(seed)
    records = []
    answers = []
    for number in range(num_docs):
        record, answer = _document(rng, f"syn-{number:04d}")
        records.append(record)
        answers.append(answer)

    vocabulary = set()
    for record in records:
        vocabulary.update(tokenize(record["document"]))
        vocabulary.update(tokenize(record["reference"]))

    logger.debug("Generated %d documents, %d words", num_docs, len(vocabulary))
    return SyntheticCorpus(
        records=tuple(records),
        answers=tuple(answers),
        vocabulary=tuple(sorted(vocabulary)),
    )


def _embedding_lines(vocabulary: Sequence[str], *, dim: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    vectors = rng.standard_normal((len(vocabulary), dim))
    lines = [f"{len(vocabulary)} {dim}"]
    for token, vector in zip(vocabulary, vectors):
        lines.append(" ".join([token, *(f"{value:.6f}" for value in vector)]))
    return "\n".join(lines) + "\n"


def write_corpus(
    corpus: SyntheticCorpus,
    directory: pathlib.Path,
    *,
    dim: int = DEFAULT_DIM,
    seed: int = 0,
) -> SyntheticPaths:
    """Write a synthetic corpus with its QA answers, vectors and run config.

    The config points at the written files with relative paths and sends
    pipeline output to ``out/`` next to it.

    :param corpus: Corpus from :func:`generate`.
    :param directory: Destination directory, created if needed.
    :param dim: Dimension of the random word vectors.
    :param seed: Seed of the random word vectors.

    :returns: Paths of the written files.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")

    directory.mkdir(parents=True, exist_ok=True)
    paths = SyntheticPaths(
        corpus=directory / "corpus" / "documents.jsonl",
        qa_answers=directory / "qa.jsonl",
        embeddings=directory / "embeddings.txt",
        config=directory / "config.json",
    )
    paths.corpus.parent.mkdir(exist_ok=True)

    jsonl.write_jsonl_atomic(paths.corpus, corpus.records)
    jsonl.write_jsonl_atomic(paths.qa_answers, corpus.answers)
    jsonl.write_text_atomic(
        paths.embeddings, _embedding_lines(corpus.vocabulary, dim=dim, seed=seed)
    )

    config = {
        "paths": {
            "corpus": "corpus",
            "format": "jsonl",
            "embeddings": paths.embeddings.name,
            "qa_answers": paths.qa_answers.name,
            "output_dir": "out",
        },
        "train": {"seed": seed},
        "mode": "one_sentence",
    }
    jsonl.write_text_atomic(paths.config, jsonl.dumps(config) + "\n")

    logger.info(
        "Wrote synthetic corpus of %d documents to %s", len(corpus.records), directory
    )
    return paths
