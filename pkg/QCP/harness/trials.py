"""
Trials - Seeded Fan-Out and Statistics

Runs a batch of protocol trials and aggregates them.

RULES:
1. Trial t draws from its own stream, derived from (master_seed, t) only
2. Trials are split into contiguous chunks; each chunk has its own accumulator
3. Accumulators merge by integer sums and counters, so the report does not
   depend on the number of workers or the order chunks finish
4. Every trial is checked against its hidden sequence: wrong change points,
   wrong mutations and mislabeled distilled pairs are counted, never expected

USAGE:
    report = run_trials(config)
    report.mean_consumed, report.status_histogram
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..protocol.bell import run_bell
from ..protocol.model import ChangePoint, Regime, draw_change_point, sample_sequence
from ..protocol.orthogonal import run_orthogonal
from ..protocol.results import BRANCHES, Status
from ..protocol.unambiguous import run_unambiguous
from .config import ChangePointMode, MutationMode

logger = logging.getLogger(__name__)

# identification_rate counts only these statuses with an exact (or no-change) report
EXACT_STATUSES = (Status.IDENTIFIED, Status.NO_CHANGE_CONFIRMED)


def child_rng(master_seed, trial):
    """Independent numpy Generator for trial t."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def draw_trial_sequence(config, trial, rng):
    """Hidden sequence of one trial (change point first, then mutation)."""
    source = config.source()
    if config.change_point_mode is ChangePointMode.UNIFORM:
        change_point = draw_change_point(config.n, rng)
    elif config.change_point_mode is ChangePointMode.SWEEP:
        change_point = ChangePoint(k=1 + trial % (config.n + 1), n=config.n)
    else:
        change_point = ChangePoint(k=config.fixed_k, n=config.n)

    if config.mutation_mode is MutationMode.FIXED:
        mutation = config.fixed_mutation
    else:
        mutation = min(1 + int(rng.random() * source.mutation_count), source.mutation_count)
    return sample_sequence(source, change_point, mutation)


def run_protocol(config, seq, rng):
    """Dispatch one sequence to the protocol of the config's regime."""
    if config.regime is Regime.ORTHOGONAL:
        return run_orthogonal(seq)
    if config.regime is Regime.NONORTHOGONAL:
        return run_unambiguous(seq, config.overlap, rng, config.priors_variant)
    return run_bell(seq, rng)


def run_single_trial(config, trial):
    """
    Run trial t of a batch.

    Returns:
        tuple: (SequenceInstance, ProtocolResult)
    """
    rng = child_rng(config.master_seed, trial)
    seq = draw_trial_sequence(config, trial, rng)
    return seq, run_protocol(config, seq, rng)


def mislabeled_distilled(seq, result):
    """Number of distilled pairs whose implied label differs from the hidden one."""
    return sum(1 for position, label in result.implied_labels().items() if seq.label_at(position) != label)


def trial_row(config, seq, result):
    """Per-trial CSV row."""
    if config.regime is Regime.BELL_SET:
        mutation_true = "none" if seq.change_point.is_no_change else seq.mutation
        return result.csv_row(seq.k, mutation_true)
    return result.csv_row(seq.k)


class StatsAccumulator:
    """
    Integer sums and histograms over a chunk of trials.

    USAGE:
        stats = StatsAccumulator()
        stats.add(seq, result)
        stats.merge(other)
    """

    def __init__(self):
        self.trials = 0
        self.consumed_sum = 0
        self.consumed_sq_sum = 0
        self.distilled_sum = 0
        self.distilled_sq_sum = 0
        self.exact_reports = 0
        self.mutations_identified = 0
        self.wrong_change_points = 0
        self.wrong_mutations = 0
        self.mislabeled_distilled = 0
        self.status_histogram = Counter()
        self.consumed_histogram = Counter()
        self.distilled_histogram = Counter()
        self.branch_counts = Counter()

    def add(self, seq, result):
        self.trials += 1
        self.consumed_sum += result.consumed
        self.consumed_sq_sum += result.consumed ** 2
        self.distilled_sum += result.distilled
        self.distilled_sq_sum += result.distilled ** 2
        self.status_histogram[result.status.value] += 1
        self.consumed_histogram[result.consumed] += 1
        self.distilled_histogram[result.distilled] += 1

        if result.status in EXACT_STATUSES and result.reported_change_point.is_exact:
            self.exact_reports += 1
        if not result.reported_change_point.contains(seq.k):
            self.wrong_change_points += 1
        if result.reported_mutation is not None:
            if result.reported_mutation == seq.mutation and not seq.change_point.is_no_change:
                self.mutations_identified += 1
            else:
                self.wrong_mutations += 1
        self.mislabeled_distilled += mislabeled_distilled(seq, result)

        if hasattr(result, "branch_counts"):
            self.branch_counts.update(result.branch_counts())

    def merge(self, other):
        for name in ("trials", "consumed_sum", "consumed_sq_sum", "distilled_sum", "distilled_sq_sum",
                     "exact_reports", "mutations_identified", "wrong_change_points", "wrong_mutations",
                     "mislabeled_distilled"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.status_histogram.update(other.status_histogram)
        self.consumed_histogram.update(other.consumed_histogram)
        self.distilled_histogram.update(other.distilled_histogram)
        self.branch_counts.update(other.branch_counts)
        return self


def _mean_stderr(total, sq_total, count):
    mean = total / count
    if count < 2:
        return mean, 0.0
    # exact integer numerator keeps the variance independent of summation order
    variance = (count * sq_total - total * total) / (count * (count - 1))
    return mean, math.sqrt(max(variance, 0.0) / count)


@dataclass(frozen=True)
class StatsReport:
    """Aggregated statistics of one batch of trials."""
    config: dict
    trials: int
    mean_consumed: float
    stderr_consumed: float
    mean_distilled: float
    stderr_distilled: float
    identification_rate: float
    mutation_identification_rate: float
    status_histogram: dict
    consumed_histogram: dict
    distilled_histogram: dict
    branch_counts: dict
    wrong_change_points: int
    wrong_mutations: int
    mislabeled_distilled: int
    rows: list = field(default_factory=list)
    trial_records: list = field(default_factory=list)

    def to_dict(self):
        data = {
            "config": self.config,
            "trials": self.trials,
            "mean_consumed": self.mean_consumed,
            "stderr_consumed": self.stderr_consumed,
            "mean_distilled": self.mean_distilled,
            "stderr_distilled": self.stderr_distilled,
            "identification_rate": self.identification_rate,
            "mutation_identification_rate": self.mutation_identification_rate,
            "status_histogram": self.status_histogram,
            "consumed_histogram": {str(key): value for key, value in self.consumed_histogram.items()},
            "distilled_histogram": {str(key): value for key, value in self.distilled_histogram.items()},
            "branch_counts": self.branch_counts,
            "wrong_change_points": self.wrong_change_points,
            "wrong_mutations": self.wrong_mutations,
            "mislabeled_distilled": self.mislabeled_distilled,
        }
        if self.trial_records:
            data["trial_records"] = self.trial_records
        return data


def build_report(config, stats, rows=(), trial_records=()):
    """Turn merged sums into a StatsReport."""
    mean_consumed, stderr_consumed = _mean_stderr(stats.consumed_sum, stats.consumed_sq_sum, stats.trials)
    mean_distilled, stderr_distilled = _mean_stderr(stats.distilled_sum, stats.distilled_sq_sum, stats.trials)

    mutation_rate = None
    if config.regime is Regime.BELL_SET or config.mutation_count > 1:
        mutation_rate = stats.mutations_identified / stats.trials

    return StatsReport(
        config=config.to_dict(),
        trials=stats.trials,
        mean_consumed=mean_consumed,
        stderr_consumed=stderr_consumed,
        mean_distilled=mean_distilled,
        stderr_distilled=stderr_distilled,
        identification_rate=stats.exact_reports / stats.trials,
        mutation_identification_rate=mutation_rate,
        status_histogram=dict(sorted(stats.status_histogram.items())),
        consumed_histogram=dict(sorted(stats.consumed_histogram.items())),
        distilled_histogram=dict(sorted(stats.distilled_histogram.items())),
        branch_counts={branch: stats.branch_counts[branch] for branch in BRANCHES}
        if config.regime is Regime.BELL_SET else {},
        wrong_change_points=stats.wrong_change_points,
        wrong_mutations=stats.wrong_mutations,
        mislabeled_distilled=stats.mislabeled_distilled,
        rows=list(rows),
        trial_records=list(trial_records),
    )


def _run_chunk(config, trials, keep_rows):
    stats = StatsAccumulator()
    rows = []
    records = []
    for trial in trials:
        seq, result = run_single_trial(config, trial)
        stats.add(seq, result)
        if keep_rows:
            rows.append(trial_row(config, seq, result))
        if config.transcripts:
            records.append({"trial": trial, "sequence": seq.to_dict(),
                            "result": result.to_dict(include_transcript=True)})
    return stats, rows, records


def _chunks(trials, workers):
    size = math.ceil(trials / workers)
    return [range(start, min(start + size, trials)) for start in range(0, trials, size)]


def run_trials(config, keep_rows=False):
    """
    Run every trial of a validated config.

    Args:
        config: TrialConfig (validated)
        keep_rows: Keep per-trial CSV rows in trial order

    Returns:
        StatsReport
    """
    chunks = _chunks(config.trials, config.workers)
    if config.workers == 1:
        outputs = [_run_chunk(config, chunk, keep_rows) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(lambda chunk: _run_chunk(config, chunk, keep_rows), chunks))

    stats = StatsAccumulator()
    rows, records = [], []
    for chunk_stats, chunk_rows, chunk_records in outputs:
        stats.merge(chunk_stats)
        rows.extend(chunk_rows)
        records.extend(chunk_records)

    report = build_report(config, stats, rows, records)
    if report.wrong_change_points or report.wrong_mutations or report.mislabeled_distilled:
        logger.error("❌ %s trials produced wrong reports: %d change points, %d mutations, %d distilled pairs",
                     config.regime.value, report.wrong_change_points, report.wrong_mutations,
                     report.mislabeled_distilled)
    logger.info("✅ %d %s trials (n=%d): mean consumed %.4f ± %.4f",
                report.trials, config.regime.value, config.n, report.mean_consumed, report.stderr_consumed)
    return report
