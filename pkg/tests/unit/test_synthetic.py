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

import json

import pytest

from weaksum import synthetic
from weaksum.config import load_config
from weaksum.corpus import split_sentences, tokenize
from weaksum.embeddings import load_embeddings


@pytest.fixture(scope="module")
def corpus():
    return synthetic.generate(num_docs=50, seed=3)


def test_generate_is_deterministic(corpus):
    assert synthetic.generate(num_docs=50, seed=3) == corpus
    assert synthetic.generate(num_docs=50, seed=4) != corpus


def test_ids(corpus):
    assert [record["id"] for record in corpus.records][:3] == [
        "syn-0000",
        "syn-0001",
        "syn-0002",
    ]
    assert len(corpus.records) == len(corpus.answers) == 50


def test_topic_appears_in_one_sentence(corpus):
    for record in corpus.records:
        sentences = split_sentences(record["document"])

        assert synthetic.MIN_SENTENCES <= len(sentences) <= synthetic.MAX_SENTENCES
        assert [record["topic"] in sentence for sentence in sentences].count(True) == 1


def test_answer_is_in_document(corpus):
    for record, answer in zip(corpus.records, corpus.answers):
        assert answer["id"] == record["id"]
        assert answer["topic"] == record["topic"]
        assert answer["answer"] in record["document"]


def test_vocabulary_covers_corpus(corpus):
    vocabulary = set(corpus.vocabulary)

    for record in corpus.records:
        assert set(tokenize(record["document"])) <= vocabulary
        assert set(tokenize(record["reference"])) <= vocabulary


def test_generate_needs_documents():
    with pytest.raises(ValueError):
        synthetic.generate(num_docs=0)


def test_write_corpus(corpus, tmp_path):
    paths = synthetic.write_corpus(corpus, tmp_path / "syn", dim=4, seed=9)

    lines = paths.corpus.read_text().splitlines()
    assert [json.loads(line) for line in lines] == list(corpus.records)
    assert len(paths.qa_answers.read_text().splitlines()) == 50

    table = load_embeddings(paths.embeddings)
    assert table.dim == 4
    assert len(table) == len(corpus.vocabulary)

    config = load_config(paths.config)
    assert config.paths.corpus == tmp_path / "syn" / "corpus"
    assert config.paths.embeddings == paths.embeddings
    assert config.paths.qa_answers == paths.qa_answers
    assert config.paths.output_dir == tmp_path / "syn" / "out"
    assert config.train.seed == 9
    config.validate()


def test_write_corpus_invalid_dim(corpus, tmp_path):
    with pytest.raises(ValueError):
        synthetic.write_corpus(corpus, tmp_path, dim=0)
