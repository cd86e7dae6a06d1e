"""Distance metric learning with dual random projections.

Learn a Mahalanobis metric from relative comparisons by solving the
margin problem's dual in a low-dimensional random subspace and rebuilding
the full-dimensional metric from the dual variables, with one final PSD
projection.  Includes random-subspace and PCA-subspace baselines, an
exhaustive-reference solver, evaluation protocols, and harnesses that
check the method's recovery guarantees empirically.
"""

from .data import LabeledDataset, ParseError, PcaBasis, eigen_spectrum, load_libsvm, parse_libsvm, pca_fit, serialize_libsvm
from .evaluate import EvalReport, evaluate_metric, knn_accuracy, map_score
from .experiments import METHODS, RunConfig, run_method, train_trial
from .gram import GramView, KappaStats, dense_gram, gram_entry, gram_oracle, gram_vector_product, gram_view, kappa
from .harness import HarnessConfig, verify_theorem1, verify_theorem2
from .metric import assemble_subspace_metric, load_metric, metric_distance, psd_project, recover_metric, save_metric
from .projection import ProjectionMatrix, gaussian_matrix, identity_matrix, pca_matrix, project_points
from .reference import pga_solve
from .solver import DualSolution, LossModel, SolverState, csdca_solve, dual_objective, duality_gap, sdca_update, sgd_epoch
from .synth import gaussian_blobs, isotropic_cloud, margin_gapped_blobs, rank_r_blobs
from .triplets import TripletCache, TripletSet, build_cache, project_cache, sample_active_triplets

__version__ = "0.1.0"
