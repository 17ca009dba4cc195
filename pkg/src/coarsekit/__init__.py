"""Finite, exact computations around the large-scale geometry of groups and metric spaces."""
from .errors import *  # noqa: F401,F403
from .metric import (TOL, AsdimWitness, ControlFunction, FiniteMetricSpace, MapSample,
                     c_components, chain_diameter_profile, empirical_controls, is_c_geodesic,
                     map_closeness, scale_graph, ultrametrize, verify_asdim_witness)
from .groups import (BallTable, GroupOracle, StepRelation, ball_metric_space,
                     bilipschitz_constants, bs1m, delta_metric, dihedral, distortion_profile,
                     free_abelian, free_group, heisenberg, lamplighter, nu_metric,
                     oracle_from_spec, sl_n_z, word_ball, word_length)
from .rips import (Rips2Complex, build_rips, contract_loop, fixture, h1_class,
                   interleave_homotopy, rotation_number, sc_probe)
from .growth import (GrowthSeries, GrowthWitness, FolnerWitness, compare_growth,
                     folner_search, greedy_lattice, growth_series, poldeg_estimate,
                     regular_tree, tree_boundary_check)
from .splitting import (HomVector, Presentation, ValuationVector, amalgam_presentation,
                        classify_gamma_lambda, classify_semidirect, defining_subset_presentation,
                        engulfs, hnn_presentation, relators_hold, steinberg_presentation,
                        zero_in_segment)

__version__ = "0.1.0"
