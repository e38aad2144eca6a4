from nefflow.version import __version__

from nefflow.group.element import GroupElement
from nefflow.transform.action import (
    RationalMatrixFunction,
    VarianceSpec,
    transform_variance,
)
from nefflow.catalog.families import CasalisFamily, casalis_representative
from nefflow.catalog.cubic import classify_cubic_orbit_n1
from nefflow.lagrange.inversion import LagrangeProblem, lagrange_coefficient
from nefflow.recover.stages import run_recovery
from nefflow.recover.pipeline import recover_measure
