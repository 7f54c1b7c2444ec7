"""
Tables - Sweeps Over Lengths and Overlaps

Builds the analytic tables the CLI writes out: the average-cost recursion
against Monte Carlo, the exact oracle against both, and the measurement-count
bounds. Every table is a list of rows in the column order given below.
"""

import logging

from ..analysis.oracle import exact_bell_statistics, exact_expected_consumed, iterate_bound_recurrences
from ..protocol.measurement import PriorsVariant
from ..protocol.model import Regime
from ..protocol.unambiguous import recursion_table
from .config import TrialConfig
from .trials import run_trials

logger = logging.getLogger(__name__)

RECURSION_COLUMNS = ("s", "n", "N_bar", "n_minus_N_bar", "mc_mean_consumed", "mc_stderr", "trials")
ORACLE_COLUMNS = ("n", "s", "exact_mean", "recursion_N_bar", "abs_gap", "mc_mean", "mc_stderr")
BOUNDS_COLUMNS = ("n", "worst", "best", "worst_closed", "best_closed")
BELL_ORACLE_COLUMNS = ("n", "expected_consumed", "expected_distilled", "identified", "distilled_only",
                       "no_change_unresolved", "mutation_identified", "wrong_reports")


def _monte_carlo(n, s, trials, master_seed, variant, workers):
    """(mean, stderr) of consumed pairs, or (None, None) when trials is 0."""
    if not trials:
        return None, None
    config = TrialConfig(regime=Regime.NONORTHOGONAL, n=n, overlap=s, trials=trials,
                         master_seed=master_seed, priors_variant=variant, workers=workers).validate()
    report = run_trials(config)
    return report.mean_consumed, report.stderr_consumed


def recursion_sweep(overlaps, lengths, trials=0, master_seed=0, variant=PriorsVariant.PAPER, workers=1):
    """
    N_n from the recursion for every (s, n), with an optional Monte Carlo mean.

    Returns:
        list of dict rows keyed by RECURSION_COLUMNS
    """
    rows = []
    for s in overlaps:
        table = recursion_table(max(lengths), s, variant)
        for n in lengths:
            n_bar = float(table.n_bar[n])
            mc_mean, mc_stderr = _monte_carlo(n, s, trials, master_seed, variant, workers)
            rows.append({
                "s": s, "n": n, "N_bar": n_bar, "n_minus_N_bar": n - n_bar,
                "mc_mean_consumed": mc_mean, "mc_stderr": mc_stderr, "trials": trials,
            })
    logger.info("✅ recursion sweep: %d rows", len(rows))
    return rows


def oracle_comparison(lengths, overlaps, trials=0, master_seed=0, variant=PriorsVariant.PAPER, workers=1):
    """
    Exact mean consumption of the implemented process against the recursion.

    Raises:
        CapacityError: if some n is beyond the oracle's guard for its overlap
    """
    rows = []
    for s in overlaps:
        table = recursion_table(max(lengths), s, variant)
        for n in lengths:
            exact_mean = float(exact_expected_consumed(n, s, variant))
            n_bar = float(table.n_bar[n])
            mc_mean, mc_stderr = _monte_carlo(n, s, trials, master_seed, variant, workers)
            rows.append({
                "n": n, "s": s, "exact_mean": exact_mean, "recursion_N_bar": n_bar,
                "abs_gap": abs(exact_mean - n_bar), "mc_mean": mc_mean, "mc_stderr": mc_stderr,
            })
    logger.info("✅ oracle comparison: %d rows", len(rows))
    return rows


def bell_oracle_table(lengths):
    """Exact Bell-set statistics per n."""
    rows = []
    for n in lengths:
        report = exact_bell_statistics(n)
        masses = report.status_masses
        rows.append({
            "n": n,
            "expected_consumed": float(report.expected_consumed),
            "expected_distilled": float(report.expected_distilled),
            "identified": float(masses.get("identified", 0)),
            "distilled_only": float(masses.get("distilled_only", 0)),
            "no_change_unresolved": float(masses.get("no_change_unresolved", 0)),
            "mutation_identified": float(report.mutation_identified_mass),
            "wrong_reports": report.wrong_reports,
        })
    return rows


def bounds_table(n_max):
    """Worst/best measurement counts by recurrence and closed form for n = 1..n_max."""
    bounds = iterate_bound_recurrences(n_max)
    if not bounds.matches_closed_forms():
        logger.error("❌ bound recurrences disagree with the closed forms up to n=%d", n_max)
    return [
        {"n": int(n), "worst": int(worst), "best": int(best),
         "worst_closed": int(worst_closed), "best_closed": int(best_closed)}
        for n, worst, best, worst_closed, best_closed
        in zip(bounds.n, bounds.worst, bounds.best, bounds.worst_closed, bounds.best_closed)
    ]
