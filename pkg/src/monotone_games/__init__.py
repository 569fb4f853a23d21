"""Numerical toolkit for monotone and trembling-hand-perfect equilibria
in Bayesian games with ordered type and action spaces."""

from .lattice import (FiniteLattice, LatticeCheck, RenyOrderSpec, is_lattice,
                      join, meet, product_leq, reny_leq)
from .games import (ActionSpace, BayesGame, BehavioralStrategy, CellStrategy,
                    JointDensity, Marginal, MixedAction, StepStrategy,
                    TypeSpace, best_response_set, interim_payoff,
                    interim_payoff_batch, interim_payoff_mixed,
                    mc_interim_oracle)
from .conditions import (ConditionReport, check_affiliated,
                         check_increasing_differences,
                         check_interim_idc, check_interim_quasi_supermodular,
                         check_interim_single_crossing,
                         check_interim_supermodular, check_quasi_supermodular,
                         check_single_crossing, check_supermodular,
                         cutoff_family)
from .perturbation import (PerturbationScheme, PerturbedGame,
                           auction_interim_expansion, embed_strategy,
                           perturb_action_auction, perturb_action_finite,
                           perturbed_payoff)
from .auctions import (GeneralizedAuction, SimulationStats, build_all_pay,
                       build_bertrand, build_first_price, ex_post_payoff,
                       interim_payoff_auction, simulate, tie_probability,
                       validate_assumption3)
from .solver import (AuctionSolveReport, BrDiagnostic, EquilibriumResult,
                     PerfectSolveReport, SolveSettings,
                     find_monotone_equilibrium,
                     find_perfect_monotone_equilibrium, monotone_br_step,
                     profile_residual, solve_generalized_auction,
                     uniqueness_scan)
from .verification import (AdmissibilityReport, BneReport, DominanceVerdict,
                           PerfectionCertificate, check_admissibility,
                           check_bne, check_perfection, dominance_audit,
                           prohorov_bracket, prohorov_distance)
from .scenarios import SCENARIOS, Scenario, load_scenario

__version__ = "0.1.0"
