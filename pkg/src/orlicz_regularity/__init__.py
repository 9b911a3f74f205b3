"""Young-function calculus and regularity verdicts for weakly monotone
Orlicz-Sobolev functions."""
from .classifier import DirichletSample, Grade, RegularityVerdict, classify, oscillation_bound
from .counterexamples import (CounterexampleParams, certify_delta2, certify_divergence,
                              counterexample_young, generate)
from .gauges import (CapacityGauge, DiscreteDensity, HausdorffGauge, capacity_gauge,
                     capacity_upper_bound, hausdorff_admissible, kernel_potential, normalize_gauge,
                     sigma_admissible)
from .growth import boyd_lower_index, delta2_check, dominates_near_infinity, nabla2_check
from .numerics import IntegralVerdict, Outcome, improper_integral, stieltjes_integral
from .transforms import (DimensionContext, ModulusOfContinuity, a_n_minus_1, condition_condelta2,
                         condition_equiv2bis, condition_iwaniec, condition_ours, modulus_of_continuity)
from .young import (CallableYoung, PiecewiseAffine, PiecewiseAffineSpec, PowerLog, YoungFunction,
                    from_dict)

__version__ = "0.1.0"
