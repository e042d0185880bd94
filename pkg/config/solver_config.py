"""
Solver configuration: defaults, parameter sets and layered loading
"""
import dataclasses
import os
from dataclasses import dataclass, fields
from typing import Optional

from dotenv import dotenv_values

from config import settings
from utils.errors import ConfigError
from utils.format_utils import round_half_up


@dataclass(frozen=True)
class SolverConfig:
    """Every tunable of the memetic solver"""

    population_size: int = settings.DEFAULT_POPULATION_SIZE
    max_iterations: int = settings.DEFAULT_MAX_ITERATIONS
    no_improve_factor: int = settings.DEFAULT_NO_IMPROVE_FACTOR
    max_no_improve: Optional[int] = None
    elite_fraction: float = settings.ELITE_FRACTION
    mutant_fraction: float = settings.MUTANT_FRACTION
    rho_e: float = settings.RHO_ELITE
    good_pair_threshold: float = settings.GOOD_PAIR_THRESHOLD
    good_pair_probability: float = settings.GOOD_PAIR_PROBABILITY
    removal_fraction: float = settings.REMOVAL_FRACTION
    reaction_factor: float = settings.REACTION_FACTOR
    cooling: float = settings.COOLING_COEFFICIENT
    sigma1: float = settings.SIGMA_NEW_BEST
    sigma2: float = settings.SIGMA_IMPROVED
    sigma3: float = settings.SIGMA_ACCEPTED
    alns_fraction: float = settings.ALNS_FITNESS_FRACTION
    initial_temperature: float = settings.INITIAL_TEMPERATURE
    alns_enabled: bool = True
    seed: int = 0
    parameter_set: Optional[int] = settings.DEFAULT_PARAMETER_SET
    parallel: bool = False
    n_jobs: int = 1
    verbose: bool = False
    progress_every: int = 100

    @property
    def elite_count(self):
        return min(self.population_size, max(1, round_half_up(self.elite_fraction * self.population_size)))

    @property
    def mutant_count(self):
        return min(self.population_size - self.elite_count,
                   round_half_up(self.mutant_fraction * self.population_size))

    @property
    def crossover_count(self):
        return self.population_size - self.elite_count - self.mutant_count

    @property
    def tag(self):
        return f"set{self.parameter_set}" if self.parameter_set is not None else "custom"

    def no_improve_limit(self, n):
        """Generations without improvement before stopping, for an instance of n orders"""
        if self.max_no_improve is not None:
            return self.max_no_improve
        return self.no_improve_factor * n

    def validate(self):
        """Raise ConfigError on the first invalid field"""
        if self.population_size < 1:
            raise ConfigError(f"population_size must be >= 1, got {self.population_size}")
        if self.max_iterations < 0:
            raise ConfigError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if self.no_improve_factor < 0 or (self.max_no_improve is not None and self.max_no_improve < 0):
            raise ConfigError("no-improvement limits must be >= 0")
        for name in ("elite_fraction", "mutant_fraction", "rho_e", "good_pair_probability",
                     "removal_fraction", "reaction_factor", "cooling", "alns_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.elite_count + self.mutant_count > self.population_size:
            raise ConfigError("elite and mutant counts exceed the population size")
        if not self.sigma1 > self.sigma2 > self.sigma3 > 0:
            raise ConfigError(
                f"score increments must satisfy sigma1 > sigma2 > sigma3 > 0, "
                f"got {self.sigma1}, {self.sigma2}, {self.sigma3}"
            )
        if self.initial_temperature <= 0:
            raise ConfigError(f"initial_temperature must be > 0, got {self.initial_temperature}")
        if self.good_pair_threshold < 0:
            raise ConfigError(f"good_pair_threshold must be >= 0, got {self.good_pair_threshold}")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be non-zero")
        if self.progress_every < 1:
            raise ConfigError(f"progress_every must be >= 1, got {self.progress_every}")
        return self

    def replace(self, **overrides):
        """Copy with overrides; None values are ignored"""
        overrides = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **overrides)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def for_parameter_set(cls, tag, base=None):
        """Apply one of the five named parameter sets on top of base"""
        try:
            tag = int(tag)
        except (TypeError, ValueError):
            raise ConfigError(f"Invalid parameter set tag: {tag!r}")
        if tag not in settings.PARAMETER_SETS:
            raise ConfigError(f"Invalid parameter set tag: {tag} (expected 1-5)")
        base = base or cls()
        return dataclasses.replace(base, parameter_set=tag, max_no_improve=None,
                                   **settings.PARAMETER_SETS[tag])

    @classmethod
    def from_mapping(cls, values, base=None):
        """Build from string key/values (config files, environment)"""
        base = base or cls()
        by_name = {f.name: f for f in fields(cls)}
        overrides = {}
        for key, raw in values.items():
            name = key.strip().lower()
            if name not in by_name:
                raise ConfigError(f"Unknown configuration key: {key}")
            overrides[name] = _coerce(name, raw, getattr(base, name))
        if "parameter_set" in overrides and overrides["parameter_set"] is not None:
            base = cls.for_parameter_set(overrides["parameter_set"], base)
        return dataclasses.replace(base, **overrides)

    @classmethod
    def from_file(cls, path, base=None):
        """Read a key=value config file"""
        if not os.path.exists(path):
            raise ConfigError(f"Config file not found: {path}")
        values = {k: v for k, v in dotenv_values(path).items() if v is not None}
        return cls.from_mapping(values, base)

    @classmethod
    def from_env(cls, base=None, environ=None):
        """Pick up OAS_<FIELD> variables (after load_dotenv)"""
        environ = os.environ if environ is None else environ
        prefix = settings.ENV_PREFIX
        names = {f.name for f in fields(cls)}
        values = {
            key[len(prefix):]: value
            for key, value in environ.items()
            if key.startswith(prefix) and key[len(prefix):].lower() in names
        }
        return cls.from_mapping(values, base)


def _coerce(name, raw, current):
    """Convert a config string to the type of the field's current value"""
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if text.lower() in ("", "none", "null"):
        if name in ("max_no_improve", "parameter_set"):
            return None
        raise ConfigError(f"{name} cannot be empty")
    try:
        if isinstance(current, bool):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(current, int) or name in ("max_no_improve", "parameter_set"):
            return int(text)
        if isinstance(current, float):
            return float(text)
    except ValueError:
        raise ConfigError(f"Invalid value for {name}: {raw!r}")
    return text
