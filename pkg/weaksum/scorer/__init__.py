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

"""Linear sentence scorer, ranking and summary selection."""

from .errors import ScorerError, TrainingError  # noqa: F401
from .features import FEATURE_NAMES, featurize  # noqa: F401
from .model import (  # noqa: F401
    LinearScorer,
    TrainConfig,
    TrainingReport,
    cross_entropy,
    gradient,
    load_model,
    loss,
    predict,
    save_model,
    train,
)
from .summaries import (  # noqa: F401
    BudgetMode,
    oracle_summary,
    random_ranking,
    rank,
    rank_scores,
    select_summary,
)
