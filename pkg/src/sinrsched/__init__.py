"""Wireless link scheduling in the SINR model with oblivious power control."""

from .errors import (
    ColocationError,
    DomainError,
    FadingViolation,
    InvariantError,
    OracleScaleError,
    ParseError,
    PreconditionError,
    SinrError,
    ValidationError,
)
from .logscalar import LogScalar
from .metricspace import FadingParams, MetricSpec, c_prime, distance, equilength_ratio_bound, z1, z2, zeta
from .sinrcore import (
    Instance,
    Link,
    PowerAssignment,
    affectance_pair,
    affectance_set,
    directed_distance,
    is_p_signal,
    is_sinr_feasible,
    pc_feasible,
)
from .schedulers import (
    CapacityResult,
    Schedule,
    capacity_meanpower,
    schedule_equilength_udg,
    schedule_lengthgroups_uniform,
    schedule_meanpower,
    weighted_capacity_meanpower,
)
from .instancegen import gen_grid, gen_lowerbound, gen_random, parse_instance, serialize_instance

__version__ = "0.1.0"
