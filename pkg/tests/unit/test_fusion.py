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

import numpy as np
import pytest

from weaksum import errors
from weaksum.fusion import (
    FusedLabels,
    FusionConfig,
    ablate,
    expand_names,
    fuse,
    keep,
    parse_name_list,
    read_labels,
    system_name,
    system_slug,
    write_labels,
)
from weaksum.signals import BINARY_SIGNALS, SIGNAL_NAMES, SignalMatrix


def make_matrix(**values) -> SignalMatrix:
    lengths = {len(row) for row in values.values()}
    return SignalMatrix(
        doc_id="d1",
        topic_text="t",
        n=lengths.pop(),
        values={name: tuple(row) for name, row in values.items()},
    )


def random_matrix(rng: np.random.Generator) -> SignalMatrix:
    n = int(rng.integers(1, 11))
    count = int(rng.integers(1, len(SIGNAL_NAMES) + 1))
    names = rng.choice(SIGNAL_NAMES, size=count, replace=False)
    values = {}
    for name in names:
        if name in BINARY_SIGNALS:
            row = rng.integers(0, 2, size=n).astype(float)
        else:
            row = rng.random(n)
        values[str(name)] = tuple(float(value) for value in row)
    return SignalMatrix(doc_id="d1", topic_text="t", n=n, values=values)


def random_config(rng: np.random.Generator) -> FusionConfig:
    return FusionConfig(
        weights={name: float(rng.uniform(0.1, 2.0)) for name in SIGNAL_NAMES}
    )


def test_equal_signals_any_weights():
    matrix = make_matrix(topic_sent=[0.4, 0.8], sent_sent=[0.4, 0.8])
    config = FusionConfig(weights={"topic_sent": 3.0, "sent_sent": 0.25})

    assert fuse(matrix, config).targets == pytest.approx((0.4, 0.8), abs=1e-12)


def test_one_hot_weight():
    matrix = make_matrix(rule=[1, 0, 1], topic_sent=[0.2, 0.9, 0.5])
    config = FusionConfig(weights={"rule": 1.0, "topic_sent": 0.0})

    assert fuse(matrix, config).targets == (1.0, 0.0, 1.0)


def test_equal_weights_arithmetic():
    matrix = make_matrix(ext=[1, 0], rule=[0, 1])

    labels = fuse(matrix, FusionConfig.equal())

    assert labels == FusedLabels(doc_id="d1", topic_text="t", targets=(0.5, 0.5))


def test_missing_signals_renormalize():
    matrix = make_matrix(rule=[1, 0], topic_sent=[0.5, 0.25])

    config = FusionConfig(weights={"rule": 1.0, "topic_sent": 3.0, "qa": 4.0})

    labels = fuse(matrix, config)

    assert labels.targets == pytest.approx((0.625, 0.1875), abs=1e-12)


def test_renormalization_scale():
    matrix = make_matrix(ext=[1, 0, 0], topic_sent=[0.1, 0.7, 0.3])

    large = fuse(matrix, FusionConfig(weights={"ext": 2.0, "topic_sent": 2.0}))
    small = fuse(matrix, FusionConfig(weights={"ext": 0.5, "topic_sent": 0.5}))

    assert large.targets == pytest.approx(small.targets, abs=1e-12)


def test_no_weighted_signal_present():
    matrix = make_matrix(ext=[1, 0], qa=[0, 1])
    config = ablate(FusionConfig.equal(), ["ext", "qa"])

    with pytest.raises(errors.FusionError) as exc_info:
        fuse(matrix, config)

    assert exc_info.value.brief == "No weighted signal present for ('d1', 't')."


def test_random_matrices_properties():
    rng = np.random.default_rng(1234)

    for _ in range(1000):
        matrix = random_matrix(rng)
        config = random_config(rng)

        targets = np.array(fuse(matrix, config).targets)
        rows = np.array([matrix.values[name] for name in matrix.present])
        weights = np.array([config.weights[name] for name in matrix.present])

        expected = (weights / weights.sum()) @ rows
        assert np.all(np.abs(targets - expected) <= 1e-12)
        assert np.all(targets >= rows.min(axis=0) - 1e-12)
        assert np.all(targets <= rows.max(axis=0) + 1e-12)
        assert np.all((targets >= 0.0) & (targets <= 1.0))

        doubled = FusionConfig(
            weights={name: 2.0 * weight for name, weight in config.weights.items()}
        )
        rescaled = np.array(fuse(matrix, doubled).targets)
        assert np.all(np.abs(rescaled - targets) <= 1e-12)

        chosen = matrix.present[int(rng.integers(0, len(matrix.present)))]
        one_hot = FusionConfig(weights={chosen: 1.0})
        assert fuse(matrix, one_hot).targets == matrix.values[chosen]


def test_permutation_equivariance():
    rng = np.random.default_rng(99)

    for _ in range(100):
        matrix = random_matrix(rng)
        config = random_config(rng)
        order = rng.permutation(matrix.n)
        permuted = SignalMatrix(
            doc_id=matrix.doc_id,
            topic_text=matrix.topic_text,
            n=matrix.n,
            values={
                name: tuple(row[index] for index in order)
                for name, row in matrix.values.items()
            },
        )

        targets = fuse(matrix, config).targets
        expected = tuple(targets[index] for index in order)
        assert fuse(permuted, config).targets == pytest.approx(expected, abs=1e-12)


def test_ablate_one_signal():
    config = ablate(FusionConfig.equal(), ["qa"])

    assert config.active == [
        "ext",
        "rule",
        "word_sim",
        "topic_sent",
        "ref_sent",
        "sent_sent",
    ]


def test_ablate_nothing():
    config = FusionConfig.equal()

    assert ablate(config, []) == config


def test_ablate_group():
    config = ablate(FusionConfig.equal(), ["sem-sim"])

    assert config.active == ["ext", "rule", "qa"]
    assert config.weights["topic_sent"] == 0.0


def test_keep_group():
    config = keep(FusionConfig.equal(), ["ext-label"])

    assert config.active == ["ext"]


def test_expand_names():
    assert expand_names([" EXT ", "sem-sim"]) == frozenset(
        {"ext", "word_sim", "topic_sent", "ref_sent", "sent_sent"}
    )


def test_expand_names_unknown():
    with pytest.raises(errors.FusionError) as exc_info:
        expand_names(["magic"])

    assert exc_info.value.brief == "Unknown signal or group 'magic'."


def test_parse_name_list():
    assert parse_name_list("ext, QA,,ext ,") == ["ext", "qa"]


@pytest.mark.parametrize(
    "dropped,name,slug",
    [
        ([], "all", "all"),
        (["qa"], "all−{qa}", "all-minus-qa"),
        (["ext", "qa"], "all−{ext,qa}", "all-minus-ext-qa"),
    ],
)
def test_system_names(dropped, name, slug):
    assert system_name(dropped) == name
    assert system_slug(name) == slug


def test_fusion_config_equal_subset():
    config = FusionConfig.equal(["qa", "ext"])

    assert config.weights == {"ext": 1.0, "qa": 1.0}
    assert config.active == ["ext", "qa"]


@pytest.mark.parametrize(
    "weights",
    [{"rule": -0.5}, {"rule": float("nan")}, {"magic": 1.0}],
)
def test_fusion_config_invalid(weights):
    with pytest.raises(errors.FusionError):
        FusionConfig(weights=weights)


def test_write_and_read_labels(tmp_path):
    path = tmp_path / "labels.jsonl"
    first = FusedLabels(doc_id="b", topic_text="t", targets=(0.5, 1.0))
    second = FusedLabels(doc_id="a", topic_text="t", targets=(0.25,))

    assert write_labels(path, [first, second]) == 2

    assert [json.loads(line)["id"] for line in path.read_text().splitlines()] == [
        "a",
        "b",
    ]
    assert read_labels(path) == {("a", "t"): second, ("b", "t"): first}


def test_read_labels_malformed(tmp_path):
    path = tmp_path / "labels.jsonl"
    path.write_text(json.dumps({"id": "a", "topic": "t"}) + "\n")

    with pytest.raises(errors.FusionError) as exc_info:
        read_labels(path)

    assert exc_info.value.brief == f"Malformed label file {str(path)!r}."
