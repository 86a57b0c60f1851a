"""Incompatibility of quantum channels and measurements via semidefinite programming."""
from .errors import (DomainError, IncompatError, InputError, NotHermitian, NotTracePreserving, ParseError,
                     PreconditionError, ShapeError, SizeLimit, SolverError, ValidationError)
from .objects import (ChoiChannel, JointChannel, Povm, apply_via_choi, choi_from_kraus, compose, constant_channel,
                      depolarizing_channel, diagonal_joint_povm, example_sixfold_povm, example_unbiased_qubit_povm,
                      identity_channel, instrument_channel, joint_povm_marginals, lueders_channel, marginal_choi,
                      measurement_channel_choi, pauli_povm, product_joint_channel, product_joint_povm,
                      sample_k_channel, sample_random_channel, sample_random_joint_channel, sample_random_povm,
                      sharp_povm, smeared_joint_povm, trivial_povm, unitary_channel)
from .measures import (IncompatReport, diamond_distance, l1_povm_error, robustness_of_measurement,
                       roi_bisection_oracle, roi_channel_channel, roi_channel_povm, roi_povm_povm,
                       woi_channel_channel)
from .tradeoffs import (RecoverySearchResult, TradeoffReport, hm_bound, minimize_disturbance, prop3_bound,
                        recovered_distance, verify_corollary, verify_hm_dominance, verify_lipschitz, verify_prop3,
                        verify_theorem1, verify_theorem2, verify_theorem4)
from .io import parse_device, serialize_device
from .sdp import Settings, SdpProblem, SdpSolution, solve_sdp

__version__ = "0.1.0"
