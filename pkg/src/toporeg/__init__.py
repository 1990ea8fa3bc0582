"""Topological regularization of data embeddings in the plane."""

__version__ = "0.1.0"

from .errors import ToporegError
from .geometry import Filtration, PointCloud, alpha_filtration, delaunay
from .persistence import (Persistence, PersistenceDiagram, PersistencePair, betti,
                          compute_persistence, representative_cycle)
from .topoloss import (TopoLossSpec, TopoLossTerm, centrality, spec_gradient, spec_value,
                       term_gradient, term_value, total_persistence)
from .optimizer import LossTrace, OptimizerConfig, run, run_linear_with_topo
from .trajectory import circular_correlation, community_separation, infer_pseudotime
