from .barcodes import Barcode, Interval, elder_barcode, rank_from_barcode, rank_from_tree
from .cophenetic import cophenetic_distance, cophenetic_vector, optimal_labeling
from .interleaving import (
    InterleavingWitness,
    check_witness,
    interleaving_distance,
    interleaving_exists,
    optimal_interleaving,
)
from .presentation_distance import (
    Certificate,
    DistanceBracket,
    interleaving_to_presentations,
    presentation_distance_bracket,
    presentations_to_interleaving,
    semi_distance_upper,
)
from .wasserstein import Matching, wasserstein, wasserstein_brute_force
