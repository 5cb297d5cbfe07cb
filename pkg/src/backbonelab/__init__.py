"""backbonelab: bipartite projection, backboning, and strategy comparison."""

__version__ = "0.1.0"

from .backboning import (BackboneMethod, DEFAULT_FRACTIONS, ScoredBackbone,
                         ThresholdGrid, extract, resolve_thresholds, score,
                         score_disparity, score_naive, score_noise_corrected)
from .graphs import (BipartiteGraph, DegreeReport, GraphError, WeightedGraph,
                     degree_report, ingest_bipartite, read_weighted_edgelist,
                     write_bipartite_edgelist, write_weighted_edgelist)
from .metrics import (TopologyReport, UndefinedMetricError, betweenness_centrality,
                      cc_similarity, centralization, coverage, degree_correlation,
                      modularity_partition, neighbor_jaccard, topology_report,
                      transitivity)
from .projection import (ConvergenceError, ProjectionMethod, ProjectionSpec, Side,
                         project, project_hyperbolic, project_probs, project_simple,
                         project_ycn)
from .strategylab import (GridCellError, GridConfig, GridResult, SimilarityMatrix,
                          StrategyClustering, StrategyRun, centralization_grid,
                          cluster_strategies, run_grid, similarity_matrices,
                          write_grid_outputs)
from .synthetic import generate_synthetic
