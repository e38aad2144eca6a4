import dataclasses
from typing import Optional
import nefflow.common.build as build
import nefflow.common.exceptions as exp
import nefflow.common.printing as printing
import nefflow.common.stage as stage
import nefflow.algebra.monomials as mono
from nefflow.algebra.rational import format_rational
from nefflow.algebra.series import SeriesVector, TruncSeries
from nefflow.recover import pipeline
from nefflow.transform.action import VarianceSpec


@dataclasses.dataclass
class RecoveryState:
    """
    Everything a recovery knows at a given point. Stages fill the fields
    in order; a field that is still None has not been computed yet.
    """

    V: VarianceSpec
    config: build.RecoveryConfig
    phi_prime: Optional[SeriesVector] = None
    phi: Optional[TruncSeries] = None
    K: Optional[SeriesVector] = None
    G: Optional[SeriesVector] = None
    measure: Optional[pipeline.MeasureTable] = None
    info: build.RecoveryInfo = dataclasses.field(default_factory=build.RecoveryInfo)

    @property
    def D(self) -> int:
        return self.config.max_degree

    def save(self, path: str):
        """Write a YAML summary of the run (timings, phi'(0), first masses, warnings)"""
        build.save_yaml(
            path,
            {
                "variance": self.V.V.to_text(),
                "max_degree": self.D,
                "stage_seconds": dict(self.info.stage_seconds),
                "phi_prime_at_zero": self.info.phi_prime_at_zero,
                "first_masses": self.info.first_masses,
                "oracle_passed": self.info.oracle_passed,
                "warnings": list(self.info.warnings),
            },
        )


def _require(state: RecoveryState, field: str, stage_name: str):
    if getattr(state, field) is None:
        raise exp.StageError(f"Stage {stage_name} needs state.{field}, which has not been computed")


class PhiPrime(stage.Stage):
    """
    Expand V(m)^{-1} m as a power series.

    Expected inputs:
     - state.V is a polynomial variance function

    Outputs:
     - state.phi_prime, with every component equal to 1 at the origin
    """

    def __init__(self):
        super().__init__(
            unique_name="phi_prime",
            monitor_message="Expanding V(m)^-1 m",
        )

    def fire(self, state: RecoveryState):
        state.phi_prime = pipeline.phi_prime_from_variance(state.V, state.D)
        state.info.phi_prime_at_zero = str(
            [format_rational(c) for c in state.phi_prime.constant_terms()]
        )
        return state


class IntegratePhi(stage.Stage):
    """
    Expected inputs:
     - state.phi_prime

    Outputs:
     - state.phi, the potential with phi(0) = 0
    """

    def __init__(self):
        super().__init__(
            unique_name="integrate_phi",
            monitor_message="Integrating the gradient",
        )

    def fire(self, state: RecoveryState):
        _require(state, "phi_prime", self.unique_name)
        state.phi = pipeline.integrate_phi(state.phi_prime)
        return state


class SolveK(stage.Stage):
    def __init__(self):
        super().__init__(
            unique_name="solve_k",
            monitor_message="Solving for K",
        )

    def fire(self, state: RecoveryState):
        _require(state, "phi", self.unique_name)
        state.K = pipeline.solve_K(state.phi)
        return state


class ExponentiateK(stage.Stage):
    def __init__(self):
        super().__init__(
            unique_name="exponentiate_k",
            monitor_message="Computing G = exp(K)",
        )

    def fire(self, state: RecoveryState):
        _require(state, "K", self.unique_name)
        state.G = pipeline.exponentiate_K(state.K)
        return state


class ExtractMeasure(stage.Stage):
    """
    Lagrange extraction of every mass with |k| <= D.

    Expected inputs:
     - state.phi and state.G

    Outputs:
     - state.measure
     - a warning in state.info.warnings for every mu_(e_i) <= 0
    """

    def __init__(self):
        super().__init__(
            unique_name="extract_measure",
            monitor_message="Extracting the masses",
        )

    def fire(self, state: RecoveryState):
        _require(state, "phi", self.unique_name)
        _require(state, "G", self.unique_name)
        state.measure = pipeline.extract_measure(state.phi, state.G)
        state.info.first_masses = state.measure.first_masses()

        n = state.V.n
        for i in range(n):
            value = state.measure[mono.unit(n, i)]
            if value <= 0:
                warning = f"mu_(e_{i + 1}) = {format_rational(value)} is not positive"
                state.info.warnings.append(warning)
                printing.log_warning(warning)
        return state


class CheckRoundTrip(stage.Stage):
    """
    Rebuild the variance function from the recovered masses and compare
    it with the input through degree D - 2. Skipped unless
    config.check_oracle is set.
    """

    def __init__(self):
        super().__init__(
            unique_name="check_round_trip",
            monitor_message="Checking the generating-function round trip",
        )

    def fire(self, state: RecoveryState):
        if not state.config.check_oracle:
            return state
        _require(state, "measure", self.unique_name)
        state.info.oracle_passed = pipeline.round_trip_agrees(state.V, state.measure)
        if not state.info.oracle_passed:
            msg = f"""
            The variance function rebuilt from the recovered masses does not
            match {state.V.V.to_text()} through degree {state.D - 2}.
            """
            raise exp.StageError(msg)
        return state


def default_recovery_sequence() -> stage.Sequence:
    return stage.Sequence(
        "recover",
        "Recovering the generating measure:",
        [PhiPrime(), IntegratePhi(), SolveK(), ExponentiateK(), ExtractMeasure(), CheckRoundTrip()],
    )


def run_recovery(V: VarianceSpec, config: build.RecoveryConfig, monitor: bool = False) -> RecoveryState:
    state = RecoveryState(V, config)
    return default_recovery_sequence().launch(state, monitor=monitor)
