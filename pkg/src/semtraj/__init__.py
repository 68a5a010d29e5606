"""Semantic trajectory similarity join at scale.

Trajectories are encoded against a multi-level place hierarchy, partitioned
by order-preserving type shingles, scored with a multi-level LCS similarity
and grouped into maximal-clique communities.
"""

from .baselines import centralized_all_pairs, centralized_similar, minhash_candidates, minhash_similar
from .community import build_graph, maximal_cliques
from .datagen import PlantSpec, demo_forest, demo_trajectories, gen_forest, gen_trajectories
from .encoder import EncodedCorpus, ForestSource, encode_corpus, encode_trajectory, level_view, load_forest
from .engine import PipelineResult, parallel_group_by, run_pipeline
from .evaluation import EvalReport, bench, qa1, qa2
from .model import (
    Community,
    EncodedTrajectory,
    Encoding,
    ScoredPair,
    SemanticForest,
    SemtrajError,
    SimilarityConfig,
    Trajectory,
    canonical_pair,
)
from .partitioner import CandidatePairSet, ShingleRow, candidate_pairs, explode, partition_stats
from .shingler import ShingleSet, expected_collision_rate, k_shingles
from .similarity import ScoredPairTable, filter_similar, lcs_length, mss, score_candidates

__version__ = "0.1.0"
