from .quantize import MeasurementMatrix, binarize, gaussian_matrix, mixed_sign_matrix, mirrored_pair_matrix
from .scb import ScbModel, TuplePlan, sample_tuples, train, score, classify
from .iscb import IscbModel, train_iterative, score_iterative, classify_iterative
