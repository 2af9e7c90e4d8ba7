"""Peptide design with GS-kernel ridge regression.

Trains unnormalized and normalized kernel ridge predictors of bioactivity and
finds the fixed-length sequences maximizing them: by dynamic programming for
the unnormalized predictor and by branch and bound for the normalized one.
"""

from .encoding import DescriptorTable, decode, encode, load_descriptors, toy_table
from .kernel import GSParams, gram_matrix, gs, normalized_kernel
from .preimage_dp import argmax_linear, build_tables
from .regression import TrainedModel, TrainingSet, cross_validate, fit, predict, predict_h, predict_h_star
from .search import SearchResult, compare_rankings, design, design_unnormalized

__all__ = [
    "DescriptorTable", "GSParams", "SearchResult", "TrainedModel", "TrainingSet",
    "argmax_linear", "build_tables", "compare_rankings", "cross_validate", "decode",
    "design", "design_unnormalized", "encode", "fit", "gram_matrix", "gs",
    "load_descriptors", "normalized_kernel", "predict", "predict_h", "predict_h_star",
    "toy_table",
]
