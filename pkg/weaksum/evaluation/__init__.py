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

"""ROUGE evaluation and ablation reports."""

from .errors import EvaluationError  # noqa: F401
from .report import (  # noqa: F401
    AblationReport,
    ReportRow,
    ablation_report,
    evaluate_corpus,
    render_table,
    report_json,
    rows_from_json,
)
from .rouge import RougeScore, lcs_length, ngrams, rouge_l, rouge_n  # noqa: F401
