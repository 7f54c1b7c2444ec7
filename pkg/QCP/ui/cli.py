"""
Command-Line Interface

Subcommands:
    orthogonal     binary search on orthogonal pairs
    nonorthogonal  unambiguous search on pairs with overlap s
    bell           Bell-set protocol with three mutations
    recursion      average-cost recursion table (optionally with Monte Carlo)
    bounds         worst/best measurement counts, recurrence vs closed form
    oracle         exact enumeration against the recursion (or --bell statistics)

Exit codes: 0 success, 2 invalid configuration, 3 oracle capacity exceeded.

USAGE:
    python -m QCP.main orthogonal --n 16 --trials 17 --change-point sweep --format csv
    python -m QCP.main oracle --n 1,2,3,4 --overlap 0,0.3,0.6 --trials 10000
"""

import argparse
import logging
import sys

from ..harness.config import (OutputFormat, TrialConfig, load_defaults, parse_change_point,
                              parse_mutation)
from ..harness.output import format_summary, write_csv, write_json
from ..harness.tables import (BELL_ORACLE_COLUMNS, BOUNDS_COLUMNS, ORACLE_COLUMNS, RECURSION_COLUMNS,
                              bell_oracle_table, bounds_table, oracle_comparison, recursion_sweep)
from ..harness.trials import run_trials
from ..protocol.errors import CapacityError, ConfigError, DomainError
from ..protocol.measurement import PriorsVariant
from ..protocol.model import Regime

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3

TRIAL_COLUMNS = ("n", "k_true", "k_reported", "consumed", "distilled_default", "distilled_mutation", "status")
BELL_TRIAL_COLUMNS = TRIAL_COLUMNS + ("mutation_true", "reported_mutation", "a1", "a1.1", "a1.2", "a2")

REGIMES = {
    "orthogonal": Regime.ORTHOGONAL,
    "nonorthogonal": Regime.NONORTHOGONAL,
    "bell": Regime.BELL_SET,
}


def parse_list(text, cast):
    """Comma-separated values, e.g. "1,2,4" -> [1, 2, 4]."""
    try:
        values = [cast(part) for part in str(text).split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list, got {text!r}") from None
    if not values:
        raise ConfigError("empty list")
    return values


def _add_common(parser):
    parser.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], help="output format")
    parser.add_argument("--priors", choices=[v.value for v in PriorsVariant], help="measurement priors")
    parser.add_argument("--config", help="JSON file replacing the built-in defaults")
    parser.add_argument("--workers", type=int, help="worker threads for trial fan-out")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")


def build_parser():
    parser = argparse.ArgumentParser(prog="qcp", description="LOCC change-point protocol simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    for name in REGIMES:
        sub = commands.add_parser(name, help=f"run {name} protocol trials")
        sub.add_argument("--n", type=int, help="sequence length")
        sub.add_argument("--trials", type=int, help="number of trials")
        sub.add_argument("--change-point", help="uniform | sweep | K")
        sub.add_argument("--mutation", help="uniform | I")
        sub.add_argument("--transcripts", action="store_true", help="include per-trial transcripts (json)")
        if name == "nonorthogonal":
            sub.add_argument("--overlap", type=float, help="overlap s in [0, 1]")
        if name == "orthogonal":
            sub.add_argument("--mutation-count", type=int, help="locally distinguishable mutations")
        _add_common(sub)

    sub = commands.add_parser("recursion", help="average-cost recursion sweep")
    sub.add_argument("--n", help="comma-separated lengths")
    sub.add_argument("--overlap", help="comma-separated overlaps")
    sub.add_argument("--trials", type=int, help="Monte Carlo trials per cell (0 = none)")
    _add_common(sub)

    sub = commands.add_parser("bounds", help="worst/best measurement counts")
    sub.add_argument("--n", type=int, help="largest length")
    _add_common(sub)

    sub = commands.add_parser("oracle", help="exact enumeration vs recursion")
    sub.add_argument("--n", help="comma-separated lengths")
    sub.add_argument("--overlap", help="comma-separated overlaps")
    sub.add_argument("--trials", type=int, help="Monte Carlo trials per cell (0 = none)")
    sub.add_argument("--bell", action="store_true", help="exact Bell-set statistics instead")
    _add_common(sub)
    return parser


def configure_logging(args):
    level = logging.WARNING
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        force=True)


def trial_config_from_args(args, defaults):
    """Defaults section, then the regime section, then command-line flags."""
    regime = REGIMES[args.command]
    settings = dict(defaults.get("trials", {}))
    settings.update(defaults.get(args.command, {}))
    config = TrialConfig.from_mapping(regime, settings)

    changes = {
        "n": args.n,
        "trials": args.trials,
        "master_seed": args.seed,
        "workers": args.workers,
        "overlap": getattr(args, "overlap", None),
        "mutation_count": getattr(args, "mutation_count", None),
        "transcripts": args.transcripts or None,
    }
    if args.format:
        changes["output_format"] = OutputFormat(args.format)
    if args.priors:
        changes["priors_variant"] = PriorsVariant(args.priors)
    if args.change_point:
        changes["change_point_mode"], changes["fixed_k"] = parse_change_point(args.change_point)
    if args.mutation:
        changes["mutation_mode"], changes["fixed_mutation"] = parse_mutation(args.mutation)
    return config.with_overrides(**changes).validate()


def run_trial_command(args, defaults):
    config = trial_config_from_args(args, defaults)
    report = run_trials(config, keep_rows=config.output_format is OutputFormat.CSV)
    if config.output_format is OutputFormat.CSV:
        columns = BELL_TRIAL_COLUMNS if config.regime is Regime.BELL_SET else TRIAL_COLUMNS
        write_csv(columns, report.rows, args.out)
    else:
        write_json(report.to_dict(), args.out)
    if args.out and not args.quiet:
        print(format_summary(report), file=sys.stderr)


def _table_settings(args, defaults):
    section = defaults.get(args.command, {})
    common = defaults.get("trials", {})
    seed = args.seed if args.seed is not None else int(common.get("master_seed", 0))
    workers = args.workers if args.workers is not None else int(common.get("workers", 1))
    priors = PriorsVariant(args.priors or common.get("priors", "paper"))
    return section, seed, workers, priors


def _write_table(args, name, columns, rows):
    if args.format == OutputFormat.JSON.value:
        write_json({"table": name, "columns": list(columns), "rows": rows}, args.out)
    else:
        write_csv(columns, rows, args.out)


def run_table_command(args, defaults):
    section, seed, workers, priors = _table_settings(args, defaults)

    if args.command == "bounds":
        n_max = args.n if args.n is not None else int(section.get("n_max", 64))
        if n_max < 1:
            raise ConfigError(f"n must be >= 1, got {n_max}")
        _write_table(args, "bounds", BOUNDS_COLUMNS, bounds_table(n_max))
        return

    lengths = parse_list(args.n, int) if args.n else [int(n) for n in section.get("n", [1, 2, 4, 8])]
    if min(lengths) < 1:
        raise ConfigError(f"lengths must be >= 1, got {lengths}")
    if args.command == "oracle" and args.bell:
        _write_table(args, "bell_oracle", BELL_ORACLE_COLUMNS, bell_oracle_table(lengths))
        return

    overlaps = parse_list(args.overlap, float) if args.overlap else [float(s) for s in section.get("overlaps", [0.3])]
    if any(not 0.0 <= s <= 1.0 for s in overlaps):
        raise ConfigError(f"overlaps must lie in [0, 1], got {overlaps}")
    trials = args.trials if args.trials is not None else int(section.get("trials", 0))
    if trials < 0:
        raise ConfigError(f"trials must be >= 0, got {trials}")

    if args.command == "recursion":
        rows = recursion_sweep(overlaps, lengths, trials, seed, priors, workers)
        _write_table(args, "recursion", RECURSION_COLUMNS, rows)
    else:
        rows = oracle_comparison(lengths, overlaps, trials, seed, priors, workers)
        _write_table(args, "oracle", ORACLE_COLUMNS, rows)


def main(argv=None):
    """
    Parse arguments, run the command, return the exit code.

    argparse usage errors exit with status 2 on their own.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args)
    try:
        defaults = load_defaults(args.config)
        if args.command in REGIMES:
            run_trial_command(args, defaults)
        else:
            run_table_command(args, defaults)
    except (ConfigError, DomainError) as e:
        logger.error("❌ %s", e)
        return EXIT_CONFIG
    except CapacityError as e:
        logger.error("❌ %s", e)
        return EXIT_CAPACITY
    return EXIT_OK
