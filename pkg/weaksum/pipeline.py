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

"""Pipeline stages.

Every stage reads the files written by earlier stages under the output
directory, writes its own outputs atomically and leaves a copy of the
resolved configuration next to them as ``config.<stage>.json``.
"""
import concurrent.futures
import dataclasses
import logging
import pathlib
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from weaksum import alignment, errors, jsonl
from weaksum.config import RunConfig
from weaksum.corpus import (
    EntityExtractor,
    FileEntityExtractor,
    HeuristicEntityExtractor,
    Ingester,
    StoredDocument,
    TopicInstance,
    extract_entities,
    generate_topics,
    read_store,
    write_store,
)
from weaksum.embeddings import (
    MeanVectorProvider,
    PrecomputedVectorProvider,
    SentenceVectorProvider,
    load_embeddings,
)
from weaksum.evaluation import (
    AblationReport,
    ReportRow,
    ablation_report,
    evaluate_corpus,
)
from weaksum.fusion import (
    FusedLabels,
    ablate,
    expand_names,
    fuse,
    keep,
    read_labels,
    system_name,
    system_slug,
    write_labels,
)
from weaksum.scorer import (
    FEATURE_NAMES,
    BudgetMode,
    LinearScorer,
    TrainingReport,
    featurize,
    load_model,
    oracle_summary,
    random_ranking,
    rank,
    save_model,
    select_summary,
    train,
)
from weaksum.signals import (
    SIGNAL_NAMES,
    SignalBuilder,
    SignalMatrix,
    load_qa_answers,
    read_matrices,
    write_matrices,
)

logger = logging.getLogger(__name__)

ORACLE = "ORACLE"
RANDOM = "RANDOM"

_T = TypeVar("_T")
_R = TypeVar("_R")


class OutputLayout:
    """File layout of a run's output directory."""

    def __init__(self, root: pathlib.Path) -> None:
        self.root = root

    @property
    def documents(self) -> pathlib.Path:
        """Document store written by ingest."""
        return self.root / "documents.jsonl"

    @property
    def signals(self) -> pathlib.Path:
        """Signal matrices written by signals."""
        return self.root / "signals.jsonl"

    @property
    def summaries_dir(self) -> pathlib.Path:
        """Directory of summaries files."""
        return self.root / "summaries"

    @property
    def report_json(self) -> pathlib.Path:
        """Machine-readable report."""
        return self.root / "report.json"

    @property
    def report_text(self) -> pathlib.Path:
        """Fixed-width report."""
        return self.root / "report.txt"

    def labels(self, slug: str) -> pathlib.Path:
        """Fused labels of a variant."""
        return self.root / "labels" / f"{slug}.jsonl"

    def model(self, slug: str) -> pathlib.Path:
        """Model file of a variant."""
        return self.root / "models" / f"{slug}.json"

    def summaries(self, slug: str, mode: BudgetMode) -> pathlib.Path:
        """Summaries of a variant in one budget mode."""
        return self.summaries_dir / f"{slug}.{BudgetMode(mode).value}.jsonl"

    def resolved_config(self, stage: str) -> pathlib.Path:
        """Provenance copy of the configuration of a stage."""
        return self.root / f"config.{stage}.json"


@dataclasses.dataclass
class IngestStats:
    """Counts reported by the ingest stage."""

    documents: int = 0
    skipped: int = 0
    topics_provided: int = 0
    topics_generated: int = 0
    without_topics: int = 0

    def lines(self) -> List[str]:
        """Lines printed by the command line."""
        return [
            f"documents: {self.documents}",
            f"skipped: {self.skipped}",
            f"topics provided: {self.topics_provided}",
            f"topics generated: {self.topics_generated}",
            f"documents without topics: {self.without_topics}",
        ]


@dataclasses.dataclass(frozen=True)
class SignalStat:
    """Coverage and range of one signal over the stage output."""

    instances: int
    mean: float
    minimum: float
    maximum: float


@dataclasses.dataclass
class SignalStats:
    """Counts and per-signal statistics of the signals stage."""

    instances: int
    skipped: int
    signals: Dict[str, SignalStat]

    def lines(self) -> List[str]:
        """Lines printed by the command line."""
        lines = [f"instances: {self.instances}", f"skipped: {self.skipped}"]
        for name in SIGNAL_NAMES:
            if name in self.signals:
                stat = self.signals[name]
                lines.append(
                    f"{name}: instances={stat.instances} mean={stat.mean:.4f} "
                    f"min={stat.minimum:.4f} max={stat.maximum:.4f}"
                )
        return lines


@dataclasses.dataclass(frozen=True)
class StageResult:
    """What a fuse, train or summarize run produced."""

    system: str
    path: pathlib.Path
    instances: int
    training: Optional[TrainingReport] = None

    def lines(self) -> List[str]:
        """Lines printed by the command line."""
        lines = [f"system: {self.system}", f"instances: {self.instances}"]
        if self.training is not None and self.training.epoch_losses:
            lines.append(f"final loss: {self.training.final_loss:.6f}")
        lines.append(f"wrote: {self.path}")
        return lines


def _map(workers: int, function: Callable[[_T], _R], items: Sequence[_T]) -> List[_R]:
    """Apply function to items, in order, on up to workers threads."""
    if workers <= 1:
        return [function(item) for item in items]

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))


def _write_resolved_config(config: RunConfig, stage: str) -> None:
    layout = OutputLayout(config.paths.output_dir)
    jsonl.write_text_atomic(
        layout.resolved_config(stage), jsonl.dumps(config.marshal()) + "\n"
    )


def _require_file(path: pathlib.Path, stage: str) -> None:
    if not path.is_file():
        raise errors.PipelineError(
            brief=f"Missing stage input {str(path)!r}.",
            resolution=f"Run the {stage} stage first.",
        )


def dropped_signals(config: RunConfig) -> List[str]:
    """Signals removed by the configured ablation, in canonical order.

    Signals outside a configured keep list count as dropped.

    :raises ConfigError: On an unknown signal or group name.
    """
    try:
        names = set(expand_names(config.fusion.drop))
        if config.fusion.keep:
            names |= set(SIGNAL_NAMES) - expand_names(config.fusion.keep)
    except errors.FusionError as error:
        raise errors.ConfigError(
            brief=error.brief, resolution=error.resolution
        ) from error
    return [name for name in SIGNAL_NAMES if name in names]


def configured_system(config: RunConfig) -> Tuple[str, str]:
    """Name and slug of the configured ablation variant."""
    name = system_name(dropped_signals(config))
    return name, system_slug(name)


def _merge(
    stored: Dict[str, StoredDocument], candidate: StoredDocument, stats: IngestStats
) -> None:
    doc_id = candidate.document.id
    existing = stored.get(doc_id)
    if existing is None:
        stored[doc_id] = candidate
        return

    if existing.document.sentences != candidate.document.sentences:
        stats.skipped += 1
        logger.warning(
            "Skipping record: %r repeats an id with another document", doc_id
        )
        return

    known = {topic.topic_text for topic in existing.topics}
    topics = [topic for topic in candidate.topics if topic.topic_text not in known]
    if len(topics) < len(candidate.topics):
        logger.debug("Dropping repeated topics of %r", doc_id)

    reference = existing.reference or candidate.reference
    topic_references = dict(existing.topic_references)
    for topic in topics:
        own = candidate.reference_for(topic.topic_text)
        if own is not None and (
            topic.topic_text in candidate.topic_references or own != reference
        ):
            topic_references[topic.topic_text] = own

    stored[doc_id] = dataclasses.replace(
        existing,
        reference=reference,
        topics=existing.topics + tuple(topics),
        topic_references=topic_references,
    )


def cmd_ingest(config: RunConfig) -> IngestStats:
    """Ingest the corpus into the document store.

    Records sharing an id and document are merged into one document with
    several topics. Each topic keeps the reference of its own record.
    Documents without a provided topic get generated ones.

    :raises ConfigError: If the corpus path is not configured.
    :raises DataError: If the corpus cannot be read.
    """
    config.require("corpus")
    config.validate()

    extractor: EntityExtractor = HeuristicEntityExtractor()
    if config.paths.entities is not None:
        extractor = FileEntityExtractor(config.paths.entities)

    assert config.paths.corpus is not None
    ingester = Ingester(
        corpus_dir=config.paths.corpus,
        corpus_format=config.paths.corpus_format,
        max_sentences=config.max_sentences,
        abbreviations=config.abbreviations,
    )

    stats = IngestStats()
    stored: Dict[str, StoredDocument] = {}
    for record in ingester.records():
        entities = extract_entities(record.document, extractor)
        topics: List[TopicInstance] = []
        if record.topic is not None:
            topics = [record.topic]
            stats.topics_provided += 1
        else:
            topics = generate_topics(
                record.document, entities, max_topics=config.max_topics
            )
            stats.topics_generated += len(topics)

        _merge(
            stored,
            StoredDocument(
                document=record.document,
                reference=record.reference,
                topics=tuple(topics),
                entities=tuple(entities),
                topic_references=(
                    {record.topic.topic_text: record.reference}
                    if record.topic is not None and record.reference is not None
                    else {}
                ),
            ),
            stats,
        )

    documents = [stored[doc_id] for doc_id in sorted(stored)]
    stats.documents = len(documents)
    stats.skipped += ingester.skipped
    stats.without_topics = sum(1 for doc in documents if not doc.topics)

    layout = OutputLayout(config.paths.output_dir)
    write_store(layout.documents, documents)
    _write_resolved_config(config, "ingest")
    logger.info("Ingested %d documents into %s", stats.documents, layout.documents)
    return stats


def _load_store(layout: OutputLayout) -> Dict[str, StoredDocument]:
    _require_file(layout.documents, "ingest")
    return {doc.document.id: doc for doc in read_store(layout.documents)}


def _provider(config: RunConfig, table) -> SentenceVectorProvider:
    if config.paths.sentence_vectors is not None:
        return PrecomputedVectorProvider(config.paths.sentence_vectors)
    return MeanVectorProvider(table)


def _signal_stats(matrices: Sequence[SignalMatrix], skipped: int) -> SignalStats:
    signals = {}
    for name in SIGNAL_NAMES:
        rows = [matrix.values[name] for matrix in matrices if name in matrix.values]
        if not rows:
            continue
        values = np.concatenate([np.asarray(row, dtype=np.float64) for row in rows])
        signals[name] = SignalStat(
            instances=len(rows),
            mean=float(values.mean()),
            minimum=float(values.min()),
            maximum=float(values.max()),
        )
    return SignalStats(instances=len(matrices), skipped=skipped, signals=signals)


def cmd_signals(config: RunConfig) -> SignalStats:
    """Compute one signal matrix per (document, topic) instance.

    Instances whose signals cannot be computed are skipped with a warning.

    :raises ConfigError: If the embeddings path is not configured.
    :raises PipelineError: If no instance yields a signal matrix.
    """
    config.require("embeddings")
    config.validate()
    layout = OutputLayout(config.paths.output_dir)
    documents = _load_store(layout)

    assert config.paths.embeddings is not None
    table = load_embeddings(config.paths.embeddings)
    answers = {}
    if config.paths.qa_answers is not None:
        answers = load_qa_answers(config.paths.qa_answers)

    builder = SignalBuilder(
        table=table,
        provider=_provider(config, table),
        enabled=config.signals.enabled,
        ext_max_select=config.signals.ext_max_select,
        qa_max_select=config.signals.qa_max_select,
    )

    instances = [
        (stored, topic)
        for doc_id in sorted(documents)
        for stored in [documents[doc_id]]
        for topic in sorted(stored.topics, key=lambda topic: topic.topic_text)
    ]

    def build(instance: Tuple[StoredDocument, TopicInstance]) -> Optional[SignalMatrix]:
        stored, topic = instance
        try:
            return builder.build(
                stored.document,
                topic,
                entities=stored.entities,
                reference=stored.reference_for(topic.topic_text),
                qa_answer=answers.get(topic.key),
            )
        except errors.SignalError as error:
            logger.warning("Skipping instance %r: %s", topic.key, error.brief)
            return None

    results = _map(config.workers, build, instances)
    matrices = [matrix for matrix in results if matrix is not None]
    if not matrices:
        raise errors.PipelineError(
            brief="No instance produced a signal matrix.",
            resolution="Check that the corpus has topics and the signals are enabled.",
        )

    write_matrices(layout.signals, matrices)
    _write_resolved_config(config, "signals")
    return _signal_stats(matrices, skipped=len(results) - len(matrices))


def _load_matrices(layout: OutputLayout) -> Dict[Tuple[str, str], SignalMatrix]:
    _require_file(layout.signals, "signals")
    return {matrix.key: matrix for matrix in read_matrices(layout.signals)}


def cmd_fuse(config: RunConfig) -> StageResult:
    """Fuse every signal matrix into soft labels for the configured variant.

    :raises FusionError: If an instance has no weighted signal left.
    """
    layout = OutputLayout(config.paths.output_dir)
    matrices = _load_matrices(layout)
    name, slug = configured_system(config)
    fusion_config = ablate(config.fusion_config(), dropped_signals(config))
    if config.fusion.keep:
        fusion_config = keep(fusion_config, config.fusion.keep)
    logger.debug("Fusing %s with %s", name, fusion_config.active)

    labels = [fuse(matrices[key], fusion_config) for key in sorted(matrices)]
    path = layout.labels(slug)
    write_labels(path, labels)
    _write_resolved_config(config, "fuse")
    return StageResult(system=name, path=path, instances=len(labels))


def _instance(
    documents: Dict[str, StoredDocument], key: Tuple[str, str]
) -> Tuple[StoredDocument, TopicInstance]:
    try:
        stored = documents[key[0]]
        return stored, stored.topic(key[1])
    except KeyError as error:
        raise errors.PipelineError(
            brief=f"Instance {key!r} is not in the document store.",
            resolution="Re-run the stages after ingest.",
        ) from error


def cmd_train(config: RunConfig) -> StageResult:
    """Train the scorer of the configured variant on its fused labels.

    :raises TrainingError: If training fails.
    """
    layout = OutputLayout(config.paths.output_dir)
    documents = _load_store(layout)
    matrices = _load_matrices(layout)
    name, slug = configured_system(config)

    labels_path = layout.labels(slug)
    _require_file(labels_path, f"fuse (with the same drop list, {name!r})")
    labels: Dict[Tuple[str, str], FusedLabels] = read_labels(labels_path)

    examples = []
    for key in sorted(labels):
        stored, topic = _instance(documents, key)
        if key not in matrices:
            raise errors.PipelineError(
                brief=f"Instance {key!r} has labels but no signal matrix.",
                resolution="Re-run the fuse stage.",
            )
        features = featurize(stored.document, topic, matrices[key])
        examples.append((features, labels[key].targets))

    scorer, report = train(examples, config.train, feature_names=FEATURE_NAMES)
    path = layout.model(slug)
    save_model(path, scorer)
    _write_resolved_config(config, "train")
    return StageResult(system=name, path=path, instances=len(examples), training=report)


def _summary_record(
    key: Tuple[str, str], summary: str, mode: BudgetMode, system: str
) -> Dict[str, str]:
    return {
        "id": key[0],
        "topic": key[1],
        "summary": summary,
        "mode": mode.value,
        "system": system,
    }


def cmd_summarize(
    config: RunConfig,
    *,
    model_path: Optional[pathlib.Path] = None,
    oracle: bool = False,
    baseline: Optional[str] = None,
) -> StageResult:
    """Write one summary per instance.

    By default the trained scorer of the configured variant ranks the
    sentences.  With oracle, sentences come from the extractive labels of
    the reference; instances without a reference are skipped.  With the
    random baseline, rankings are uniformly random, seeded by the train
    seed and the instance position.

    :raises ConfigError: On an unknown baseline or conflicting options.
    """
    if oracle and baseline is not None:
        raise errors.ConfigError(brief="--oracle and --baseline are exclusive.")
    if baseline not in (None, "random"):
        raise errors.ConfigError(
            brief=f"Unknown baseline {baseline!r}.", resolution="Use 'random'."
        )

    layout = OutputLayout(config.paths.output_dir)
    documents = _load_store(layout)
    matrices = _load_matrices(layout)
    keys = sorted(matrices)
    mode = config.mode

    if oracle:
        system, slug = ORACLE, "oracle"
    elif baseline is not None:
        system, slug = RANDOM, "random"
    else:
        system, slug = configured_system(config)

    scorer: Optional[LinearScorer] = None
    if not oracle and baseline is None:
        model_path = model_path or layout.model(slug)
        _require_file(model_path, f"train (for {system!r})")
        scorer = load_model(model_path)

    def summarize(item: Tuple[int, Tuple[str, str]]) -> Optional[Dict[str, str]]:
        position, key = item
        stored, topic = _instance(documents, key)
        document = stored.document

        if oracle:
            reference = stored.reference_for(topic.topic_text)
            if reference is None:
                logger.warning("Skipping instance %r: no reference for oracle", key)
                return None
            labels = alignment.greedy_align(
                document,
                reference.text,
                max_select=config.signals.ext_max_select,
            )
            summary = oracle_summary(document, labels, mode, reference.text)
        elif scorer is None:
            ranking = random_ranking(document, config.train.seed * 1_000_003 + position)
            summary = select_summary(ranking, document, mode)
        else:
            ranking = rank(scorer, document, topic, matrices[key])
            summary = select_summary(ranking, document, mode)

        return _summary_record(key, summary, mode, system)

    results = _map(config.workers, summarize, list(enumerate(keys)))
    records = [record for record in results if record is not None]

    path = layout.summaries(slug, mode)
    jsonl.write_jsonl_atomic(path, records)
    _write_resolved_config(config, "summarize")
    return StageResult(system=system, path=path, instances=len(records))


def _references(documents: Dict[str, StoredDocument]) -> List[Tuple[str, str, str]]:
    references = []
    for doc_id, stored in sorted(documents.items()):
        for topic in stored.topics:
            reference = stored.reference_for(topic.topic_text)
            if reference is not None:
                references.append((doc_id, topic.topic_text, reference.text))
    return references


def _read_summaries(path: pathlib.Path) -> Tuple[str, str, List[Tuple[str, str, str]]]:
    systems = set()
    modes = set()
    summaries = []
    for line_number, record in jsonl.read_jsonl(path):
        try:
            summaries.append(
                (str(record["id"]), str(record["topic"]), str(record["summary"]))
            )
            systems.add(str(record["system"]))
            modes.add(BudgetMode(record["mode"]).value)
        except (KeyError, TypeError, ValueError) as error:
            raise errors.PipelineError(
                brief=f"Malformed summary record in {str(path)!r}.",
                details=errors.details_from_line(
                    path=path, line_number=line_number, reason=repr(error)
                ),
            ) from error

    if len(systems) != 1 or len(modes) != 1:
        raise errors.PipelineError(
            brief=f"Summaries file {str(path)!r} must hold one system and one mode.",
            details=f"systems: {sorted(systems)}, modes: {sorted(modes)}",
        )
    return systems.pop(), modes.pop(), summaries


def _row_order(row: ReportRow) -> Tuple[int, int, str]:
    modes = [mode.value for mode in BudgetMode]
    baselines = {ORACLE: 1, RANDOM: 2}
    name = row.system_name
    return (
        modes.index(row.mode),
        baselines.get(name, 0),
        "" if name == "all" else name,
    )


def cmd_eval(
    config: RunConfig, summaries_paths: Optional[Iterable[pathlib.Path]] = None
) -> AblationReport:
    """Evaluate summaries files and write the ablation report.

    Summaries of documents without a reference are not scored.

    :param config: Run configuration.
    :param summaries_paths: Files to evaluate; every file under the
        summaries directory by default.  Rows are ordered by budget mode,
        then "all", the other variants by name, ORACLE and RANDOM.

    :raises PipelineError: If there is nothing to evaluate.
    :raises EvaluationError: If a summary has no reference.
    """
    layout = OutputLayout(config.paths.output_dir)
    documents = _load_store(layout)
    references = _references(documents)

    if summaries_paths is None:
        paths = sorted(layout.summaries_dir.glob("*.jsonl"))
    else:
        paths = list(summaries_paths)

    if not paths:
        raise errors.PipelineError(
            brief="No summaries to evaluate.",
            resolution="Run the summarize stage first.",
        )

    referenced = {doc_id for doc_id, _, _ in references}
    rows = []
    for path in paths:
        _require_file(path, "summarize")
        system, mode, summaries = _read_summaries(path)
        unreferenced = [item for item in summaries if item[0] not in referenced]
        if unreferenced:
            logger.info(
                "Not scoring %d summaries of %s: documents have no reference",
                len(unreferenced),
                system,
            )
            summaries = [item for item in summaries if item[0] in referenced]
        rows.append(evaluate_corpus(summaries, references, mode, system_name=system))

    report = ablation_report(sorted(rows, key=_row_order))
    jsonl.write_text_atomic(layout.report_json, jsonl.dumps(report.data) + "\n")
    jsonl.write_text_atomic(layout.report_text, report.text)
    _write_resolved_config(config, "eval")
    return report
