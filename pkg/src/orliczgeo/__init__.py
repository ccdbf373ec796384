"""Orlicz-Finsler geometry laboratory for S1-invariant potentials on CP1."""

from .weights import (WeightError, YoungWeight, ConjugateWeight,
                      make_power_weight, mollify, conjugate,
                      check_growth_sandwich, validate_weight, weight_from_spec)
from .measure import MeasureError, DiscreteMeasure, midpoint_probability
from .orlicz import (OrliczError, gauge_norm, gauge_norm_report, holder_pair,
                     mM_helpers, sandwich_stats, reset_sandwich_stats)
from .toric import (ToricError, PolytopeGrid, make_grid, SymplecticPotential,
                    GeodesicSegment, MomentMeasure, legendre, ma_pushforward,
                    rooftop, max_potential, ma_partition_check, weak_geodesic)
from .metrics import (MetricsError, am_energy, renormalize, sup_potential,
                      d_chi, d_p, d_p_pythagoras_check, i_chi_energy,
                      i_energy, e_chi_energy, ding_and_j, ricci_potential,
                      geodesic_speed, constant_speed_report)
from .epsgeodesic import (SolverError, SpaceTimeField, solve_eps_geodesic,
                          chi_length, laplacian_bound_probe,
                          sup_distance_to_geodesic, t_convexity_defect,
                          tangent_integral_report)
from .flow import (FlowError, FlowConfig, FlowState, ricci_step, run_flow,
                   stability_probe, ding_properness_probe)
from .sampling import random_potential, random_function
from .verify import run_suite

__version__ = "0.1.0"
