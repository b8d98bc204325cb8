"""Maximum-principle, Hopf-lemma, degenerate-equation, frequency-function and invariant-function checks."""

from .appendix import BUILTIN_G, invariant_G_bound, sqrt_gradient_bound_check
from .comparison import ComparisonInstance, reflection_instance, trichotomy_check
from .frequency import (
    FrequencySeries,
    PDEInstance,
    combine,
    flat_radial,
    frequency_convexity,
    frequency_series,
    harmonic_2d,
    harmonic_3d,
    radial_constant_potential,
    vanish_order_uniqueness,
)
from .hopf_lemma import (
    barrier,
    hopf_c0_lt2_corollary_check,
    hopf_exponent,
    hopf_growth_check,
    infinite_order_barrier_check,
    poisson_kernel,
)
from .report import CheckReport, Hypothesis
from .taylor import DegenerateExpansion, SourceOracle, YGrid, f_asymptotics_check, manufactured, taylor_recursion
