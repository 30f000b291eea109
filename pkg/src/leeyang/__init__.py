"""Exact Lee-Yang zeros and cumulants of finite Ising models."""

__version__ = "0.1.0"

from .lattice import CapExceeded, SpinDomain, make_box, make_rectangle, nested_boxes
from .partition import (
    DensityOfStates,
    MagnetizationPolynomial,
    enumerate_partition,
    evaluate,
    free_energy_per_site,
    partition,
    transfer_partition,
)
from .zeros import (
    InsufficientPrecision,
    ZeroCountError,
    ZeroSet,
    find_zeros,
    find_zeros_adaptive,
    first_zero,
    periodic_zero_sum,
)
from .cumulants import CumulantVector, cumulants, ursell, ursell_sum_check
from .identities import CheckReport, run_suite
from .thermo import (
    alpha1_extrapolate,
    bk_sequence,
    critical_beta,
    exact_1d_radius,
    radius_from_bk,
    susceptibility_trend,
)
