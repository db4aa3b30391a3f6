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

from weaksum.evaluation import (
    EvaluationError,
    ReportRow,
    ablation_report,
    evaluate_corpus,
    render_table,
    rows_from_json,
)


def row(name: str, score: float, mode: str = "one_sentence") -> ReportRow:
    return ReportRow(
        system_name=name,
        mode=mode,
        rouge1=score,
        rouge2=score / 2,
        rougeL=score,
        instance_count=10,
    )


def test_identical_pair():
    result = evaluate_corpus(
        [("d1", "t", "Geneva approved the plan.")],
        [("d1", "t", "Geneva approved the plan.")],
        "one_sentence",
    )

    assert result == ReportRow(
        system_name="system",
        mode="one_sentence",
        rouge1=1.0,
        rouge2=1.0,
        rougeL=1.0,
        instance_count=1,
    )


def test_unweighted_mean():
    result = evaluate_corpus(
        [("d1", "t", "the cat sat"), ("d2", "t", "a b c d")],
        [("d2", "t", "a"), ("d1", "t", "the cat"), ("d3", "t", "unused")],
        "twenty_words",
        system_name="all",
    )

    assert result.rouge1 == pytest.approx(0.6)
    assert result.system_name == "all"
    assert result.mode == "twenty_words"
    assert result.instance_count == 2


def test_same_document_different_topics():
    result = evaluate_corpus(
        [("d1", "rain", "rain fell"), ("d1", "sun", "rain fell")],
        [("d1", "rain", "rain fell"), ("d1", "sun", "sun shone")],
        "one_sentence",
    )

    assert result.rouge1 == pytest.approx(0.5)


def test_missing_reference():
    with pytest.raises(EvaluationError) as exc_info:
        evaluate_corpus(
            [("d1", "t", "text"), ("d2", "t", "text")],
            [("d1", "t", "text"), ("d2", "other", "text")],
            "one_sentence",
        )

    assert exc_info.value.brief == "1 summaries of 'system' have no reference."
    assert "d2" in exc_info.value.details


def test_no_summaries():
    with pytest.raises(EvaluationError):
        evaluate_corpus([], [("d1", "t", "text")], "one_sentence")


def test_row_needs_instances():
    with pytest.raises(EvaluationError):
        ReportRow(
            system_name="all",
            mode="one_sentence",
            rouge1=0.0,
            rouge2=0.0,
            rougeL=0.0,
            instance_count=0,
        )


def test_table_marks_maxima():
    rows = [row("all", 0.3), row("all−{qa}", 0.5), row("RANDOM", 0.4)]

    lines = ablation_report(rows).text.splitlines()

    assert len(lines) == 4
    assert lines[0].split() == ["System", "Mode", "ROUGE-1", "ROUGE-2", "ROUGE-L", "N"]
    assert lines[2].split() == [
        "all−{qa}",
        "one_sentence",
        "**50.00**",
        "**25.00**",
        "**50.00**",
        "10",
    ]
    assert "**" not in lines[1]
    assert "**" not in lines[3]


def test_table_maxima_per_mode():
    rows = [row("all", 0.3), row("all", 0.2, mode="twenty_words")]

    lines = render_table(rows).splitlines()

    assert "**30.00**" in lines[1]
    assert "**20.00**" in lines[2]


def test_table_keeps_caller_order():
    rows = [row("b", 0.1), row("a", 0.2)]

    lines = render_table(rows).splitlines()

    assert [line.split()[0] for line in lines[1:]] == ["b", "a"]


def test_json_round_trip():
    rows = [row("all", 0.3), row("ORACLE", 0.9, mode="twenty_words")]

    report = ablation_report(rows)

    assert report.data["rows"][0] == {
        "system": "all",
        "mode": "one_sentence",
        "r1": 0.3,
        "r2": 0.15,
        "rl": 0.3,
        "n": 10,
    }
    assert rows_from_json(json.loads(json.dumps(report.data))) == rows


def test_empty_report():
    with pytest.raises(EvaluationError) as exc_info:
        ablation_report([])

    assert exc_info.value.brief == "Cannot build a report without rows."
