import os
import enum
import dataclasses
from typing import Optional, Dict, Any
import yaml
from nefflow.version import __version__ as nefflow_version


environment_variables = {
    "max_degree": "NEFFLOW_MAX_DEGREE",
    "seed": "NEFFLOW_SEED",
    "cases": "NEFFLOW_CASES",
    "kmax": "NEFFLOW_KMAX",
    "max_expression_degree": "NEFFLOW_MAX_EXPRESSION_DEGREE",
    "debug": "NEFFLOW_DEBUG",
}


def _int_from_env(key: str, default: int, minimum: int) -> int:
    """
    Read a non-negative integer default from the environment, if the user
    set the corresponding variable
    """
    raw = os.environ.get(environment_variables[key])
    if not raw:
        return default

    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(
            f"Environment variable set for {environment_variables[key]} has "
            f"value {raw}, which is not an integer"
        ) from e

    if value < minimum:
        raise ValueError(
            f"Environment variable set for {environment_variables[key]} has "
            f"value {value}, which is smaller than the allowed minimum {minimum}"
        )
    return value


# Truncation degree of every power series unless the caller asks otherwise
DEFAULT_MAX_DEGREE = _int_from_env("max_degree", 8, 1)

# Randomized suites are reproducible given a seed
DEFAULT_SEED = _int_from_env("seed", 42, 0)
DEFAULT_CASES = _int_from_env("cases", 100, 1)

# Truncation bound for the infinite sums of the rouques checks
DEFAULT_KMAX = _int_from_env("kmax", 200, 1)

# Bound on "^" exponents and on the degree a polynomial expression expands to
MAX_EXPRESSION_DEGREE = _int_from_env("max_expression_degree", 64, 1)

if os.environ.get(environment_variables["debug"]) == "True":
    DEBUG = True
else:
    DEBUG = False

# Exit codes of the command line tool
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4

SUITES = [
    "composition",
    "prop34",
    "theorem52",
    "theorem54",
    "lagrange",
    "recover",
    "rouques",
]


class CheckStatus(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


@dataclasses.dataclass(frozen=True)
class SuiteConfig:
    """
    User-provided configuration of a verification run. nefflow is not
    allowed to change instances of SuiteConfig once they have been
    instantiated (frozen=True enforces this).
    """

    suite: str
    seed: int = DEFAULT_SEED
    cases: int = DEFAULT_CASES
    max_degree: int = DEFAULT_MAX_DEGREE
    kmax: int = DEFAULT_KMAX
    monitor: bool = True


@dataclasses.dataclass(frozen=True)
class RecoveryConfig:
    """
    User-provided configuration of a measure recovery.

    max_degree: truncation degree D; masses are produced for every |k| <= D
    check_oracle: rebuild V from the recovered masses and compare
        through degree D - 2
    """

    max_degree: int = DEFAULT_MAX_DEGREE
    check_oracle: bool = False


@dataclasses.dataclass
class RecoveryInfo:
    """
    Information about a recovery that may be useful for analysis
    or debugging purposes.

    Note: nefflow does not guarantee that members of this class will
    have non-None values at the end of a recovery.
    """

    stage_seconds: Dict[str, float] = dataclasses.field(default_factory=dict)
    phi_prime_at_zero: Optional[str] = None
    first_masses: Optional[Dict[str, str]] = None
    oracle_passed: Optional[bool] = None
    warnings: list = dataclasses.field(default_factory=list)


def save_yaml(path: str, contents: Dict[str, Any]):
    """
    Write a plain dictionary to `path`, stamped with the nefflow version
    """
    stamped = {"nefflow_version": nefflow_version}
    stamped.update(contents)
    with open(path, "w", encoding="utf8") as outfile:
        yaml.dump(stamped, outfile, sort_keys=False)


def load_yaml(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf8") as stream:
        return yaml.load(stream, Loader=yaml.SafeLoader)
