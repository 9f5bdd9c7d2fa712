"""Helper-aided distributed computation of functions of correlated sources."""

from .prob import (DONT_CARE, FunctionTable, JointPmf, Pmf, ValidationError, binary_entropy,
                   conditional_entropy, entropy, joint_entropy, marginals, pushforward,
                   tv_distance)
from .scaling import ScalingResult, sinkhorn_scale
from .decomposition import (Matching, MixtureComponent, MixtureDecomposition,
                            birkhoff_decompose, lemma1_decompose, max_bipartite_matching,
                            reconstruct, saturating_matching_decompose)
from .chargraph import (CharGraph, build_char_graph, chromatic_entropy_rate,
                        conditional_rate_given_matchings, is_valid_coloring, korner_entropy,
                        min_entropy_coloring, power_graph)
from .coupling import (MaximalCoupling, build_maximal_coupling, coupling_joint,
                       per_matching_deltas, sample_coupling)
from .rates import (RateReport, baselines, helper_scheme_rates, theorem1_rates,
                    theorem2_sum_rate)
from .sim import SimConfig, SimResult, huffman_codebook, run_protocol, sample_mixture
from .instances import ProblemInstance, example1, load_instance

__version__ = "0.1.0"
