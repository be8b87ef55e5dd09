"""Iterated function systems as points of a dynamical space of contraction sequences."""

from .dimension import moran_dimension, similarity_dimension, uniform_dimension
from .dynamics import EvolutionOperator, classify_periodicity, evolve, shift
from .metric import AffineContraction, ContractionAlphabet, SpaceBox, bounded_distance, sup_distance
from .sequence import IfsSequence, distinct_system, embed_finite, finite_ifs, normalize, sequence_distance

__version__ = "0.1.0"

__all__ = [
    "AffineContraction",
    "ContractionAlphabet",
    "EvolutionOperator",
    "IfsSequence",
    "SpaceBox",
    "bounded_distance",
    "classify_periodicity",
    "distinct_system",
    "embed_finite",
    "evolve",
    "finite_ifs",
    "moran_dimension",
    "normalize",
    "sequence_distance",
    "shift",
    "similarity_dimension",
    "sup_distance",
    "uniform_dimension",
]
