"""Gene regulatory network inference with scale-free-guided floating search."""
from ._jit import backend
from .criterion import (SamplePairs, extract_pairs, imp_score, is_imp, is_imp_set,
                        mean_conditional_entropy)
from .metrics import SimilarityReport, aggregate, score
from .netgen import (DegreeHistogram, DirectedGeneNetwork, degree_histogram, generate_ba,
                     generate_er, generate_ws)
from .pgn import ExpressionMatrix, TransitionModel, build_transition_model, simulate, step
from .search import (InferenceState, InferredNetwork, SearchConfig, infer_network,
                     network_inference, sbs, sffs, sffs_ba_inner, sfs)

__version__ = "0.1.0"
