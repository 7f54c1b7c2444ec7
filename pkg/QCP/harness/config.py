"""
Trial Configuration

Settings of one batch of protocol trials. Defaults live in
QCP/config/defaults.json; the CLI overrides single fields.

RULES:
1. A config is immutable once built; validate() checks it as a whole
2. Fixed change point k must lie in [1, n+1]
3. Every invalid value raises ConfigError with the offending field named

USAGE:
    defaults = load_defaults()
    config = TrialConfig.from_mapping(Regime.BELL_SET, defaults["trials"]).validate()
    config.source()  # SourceModel for the trials
"""

import enum
import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from ..protocol.errors import ConfigError
from ..protocol.measurement import PriorsVariant
from ..protocol.model import Regime, SourceModel

DEFAULTS_PATH = Path(__file__).resolve().parent.parent / "config" / "defaults.json"
MAX_SEED = 2 ** 64


class ChangePointMode(enum.Enum):
    UNIFORM = "uniform"    # k drawn from the prior
    SWEEP = "sweep"        # trial t uses k = 1 + t mod (n+1)
    FIXED = "fixed"


class MutationMode(enum.Enum):
    UNIFORM = "uniform"
    FIXED = "fixed"


class OutputFormat(enum.Enum):
    JSON = "json"
    CSV = "csv"


def load_defaults(path=None):
    """
    Read the defaults file.

    Args:
        path: JSON file with the same sections as defaults.json (optional)

    Returns:
        dict: section name -> settings
    """
    path = Path(path) if path else DEFAULTS_PATH
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e


def parse_change_point(value):
    """"uniform" | "sweep" | K -> (ChangePointMode, k or None)"""
    text = str(value).strip().lower()
    if text in ("uniform", "sweep"):
        return ChangePointMode(text), None
    try:
        return ChangePointMode.FIXED, int(text)
    except ValueError:
        raise ConfigError(f"change point must be 'uniform', 'sweep' or an integer, got {value!r}") from None


def parse_mutation(value):
    """"uniform" | I -> (MutationMode, i or None)"""
    text = str(value).strip().lower()
    if text == "uniform":
        return MutationMode.UNIFORM, None
    try:
        return MutationMode.FIXED, int(text)
    except ValueError:
        raise ConfigError(f"mutation must be 'uniform' or an integer, got {value!r}") from None


def _enum_value(enum_cls, value, field_name):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(member.value for member in enum_cls)
        raise ConfigError(f"{field_name} must be one of {choices}, got {value!r}") from None


@dataclass(frozen=True)
class TrialConfig:
    """
    One batch of protocol trials.

    For the nonorthogonal regime overlap may also be the limits 0 and 1,
    which are simulated on an orthogonal single-mutation source.
    """
    regime: Regime
    n: int
    overlap: float = 0.0
    trials: int = 1000
    master_seed: int = 0
    change_point_mode: ChangePointMode = ChangePointMode.UNIFORM
    fixed_k: int = None
    mutation_mode: MutationMode = MutationMode.UNIFORM
    fixed_mutation: int = None
    mutation_count: int = 1
    output_format: OutputFormat = OutputFormat.JSON
    priors_variant: PriorsVariant = PriorsVariant.PAPER
    workers: int = 1
    transcripts: bool = False

    @classmethod
    def from_mapping(cls, regime, mapping):
        """Build from a defaults section (plain JSON values)."""
        change_point_mode, fixed_k = parse_change_point(mapping.get("change_point", "uniform"))
        mutation_mode, fixed_mutation = parse_mutation(mapping.get("mutation", "uniform"))
        mutation_count = 3 if regime is Regime.BELL_SET else int(mapping.get("mutation_count", 1))
        try:
            return cls(
                regime=regime,
                n=int(mapping.get("n", 16)),
                overlap=float(mapping.get("overlap", 0.0)),
                trials=int(mapping.get("trials", 1000)),
                master_seed=int(mapping.get("master_seed", 0)),
                change_point_mode=change_point_mode,
                fixed_k=fixed_k,
                mutation_mode=mutation_mode,
                fixed_mutation=fixed_mutation,
                mutation_count=mutation_count,
                output_format=_enum_value(OutputFormat, mapping.get("format", "json"), "format"),
                priors_variant=_enum_value(PriorsVariant, mapping.get("priors", "paper"), "priors"),
                workers=int(mapping.get("workers", 1)),
                transcripts=bool(mapping.get("transcripts", False)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid trial settings: {e}") from e

    def with_overrides(self, **changes):
        """Copy with the given fields replaced (None values are ignored)."""
        return replace(self, **{key: value for key, value in changes.items() if value is not None})

    def validate(self):
        """
        Check the whole configuration.

        Returns:
            TrialConfig: self, so calls can be chained

        Raises:
            ConfigError: naming the first invalid field
        """
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.master_seed < MAX_SEED:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.master_seed}")

        if self.regime is Regime.NONORTHOGONAL:
            if not 0.0 <= self.overlap <= 1.0:
                raise ConfigError(f"overlap must lie in [0, 1], got {self.overlap}")
            if self.mutation_count != 1:
                raise ConfigError("nonorthogonal trials have a single mutation")
        elif self.overlap != 0.0:
            raise ConfigError(f"{self.regime.value} trials need overlap 0, got {self.overlap}")

        if self.regime is Regime.BELL_SET and self.mutation_count != 3:
            raise ConfigError("Bell-set trials have exactly three mutations")
        if self.mutation_count < 1:
            raise ConfigError(f"mutation_count must be >= 1, got {self.mutation_count}")

        if self.change_point_mode is ChangePointMode.FIXED:
            if self.fixed_k is None or not 1 <= self.fixed_k <= self.n + 1:
                raise ConfigError(f"fixed change point must lie in [1, {self.n + 1}], got {self.fixed_k}")
        if self.mutation_mode is MutationMode.FIXED:
            if self.fixed_mutation is None or not 1 <= self.fixed_mutation <= self.mutation_count:
                raise ConfigError(
                    f"fixed mutation must lie in [1, {self.mutation_count}], got {self.fixed_mutation}"
                )
        return self

    def source(self):
        """SourceModel the trials draw their sequences from."""
        if self.regime is Regime.BELL_SET:
            return SourceModel.bell(self.n)
        if self.regime is Regime.NONORTHOGONAL and 0.0 < self.overlap < 1.0:
            return SourceModel.nonorthogonal(self.n, self.overlap)
        return SourceModel.orthogonal(self.n, self.mutation_count)

    def to_dict(self):
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, enum.Enum):
                data[key] = value.value
        return data
