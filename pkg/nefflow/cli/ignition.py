from typing import Optional
from typeguard import typechecked
import nefflow.common.build as build
import nefflow.common.exceptions as exp


@typechecked
def _validate_suite_args(
    suite: str,
    seed: int,
    cases: int,
    max_degree: int,
    kmax: int,
):
    allowed = build.SUITES + ["all"]
    if suite not in allowed:
        msg = f"""
        You asked for the verification suite "{suite}", which does not exist.
        Choose from: {", ".join(allowed)}.
        """
        raise exp.ArgError(msg)

    if seed < 0:
        raise exp.ArgError(f"--seed must be a non-negative integer, got {seed}")

    if cases < 1:
        raise exp.ArgError(f"--cases must be at least 1, got {cases}")

    if max_degree < 1:
        raise exp.ArgError(f"The truncation degree must be at least 1, got {max_degree}")

    if kmax < 1:
        raise exp.ArgError(f"--kmax must be at least 1, got {kmax}")


def lock_suite_config(
    suite: str,
    seed: Optional[int] = None,
    cases: Optional[int] = None,
    max_degree: Optional[int] = None,
    kmax: Optional[int] = None,
    monitor: bool = True,
) -> build.SuiteConfig:
    """
    Process the user's configuration arguments to verify:
    1. Replace unset arguments with default values
    2. Raise exceptions for illegal arguments
    3. Lock the configuration into an immutable object
    """

    seed = build.DEFAULT_SEED if seed is None else seed
    cases = build.DEFAULT_CASES if cases is None else cases
    max_degree = build.DEFAULT_MAX_DEGREE if max_degree is None else max_degree
    kmax = build.DEFAULT_KMAX if kmax is None else kmax

    _validate_suite_args(suite=suite, seed=seed, cases=cases, max_degree=max_degree, kmax=kmax)

    return build.SuiteConfig(
        suite=suite,
        seed=seed,
        cases=cases,
        max_degree=max_degree,
        kmax=kmax,
        monitor=monitor,
    )


@typechecked
def lock_recovery_config(max_degree: Optional[int] = None, check_oracle: bool = False) -> build.RecoveryConfig:
    max_degree = build.DEFAULT_MAX_DEGREE if max_degree is None else max_degree
    if max_degree < 1:
        msg = f"""
        You set the recovery truncation degree to {max_degree}. Masses are produced
        for every |k| <= D, so D must be at least 1.
        """
        raise exp.ArgError(msg)
    if check_oracle and max_degree < 2:
        msg = f"""
        The round-trip oracle compares variances through degree D - 2, which
        is empty for D={max_degree}. Use --max-degree 2 or more.
        """
        raise exp.ArgError(msg)
    return build.RecoveryConfig(max_degree=max_degree, check_oracle=check_oracle)
