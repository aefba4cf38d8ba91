"""Volumetric mean-field CRF refinement.

Volumes are numpy arrays shaped (nz, ny, nx); label fields add a trailing
label axis, (nz, ny, nx, L).
"""

from ._core import (
    EnumerationRefused,
    KernelSpec,
    NeighborhoodMode,
    argmax_labels,
    exact_marginals,
    gaussian_filter,
    kernel_components,
    label_mask,
    masked_cross_entropy,
    neighborhood_offsets,
    precision_metrics,
    refine,
    run_cli,
    softmax,
    synthetic_nodule,
    unary_from_intensity,
)

__all__ = [
    "EnumerationRefused",
    "KernelSpec",
    "NeighborhoodMode",
    "argmax_labels",
    "exact_marginals",
    "gaussian_filter",
    "kernel_components",
    "label_mask",
    "masked_cross_entropy",
    "neighborhood_offsets",
    "precision_metrics",
    "refine",
    "run_cli",
    "softmax",
    "synthetic_nodule",
    "unary_from_intensity",
]
