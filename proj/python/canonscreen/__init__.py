"""Canonical correlation screening of paired protein/ligand descriptors."""

from ._core import (
    CanonscreenError,
    Model,
    adjusted_rand_index,
    fit,
    gen_toy,
    kmeans,
    positive_part,
    screen,
)

__all__ = [
    "CanonscreenError",
    "Model",
    "adjusted_rand_index",
    "fit",
    "gen_toy",
    "kmeans",
    "positive_part",
    "screen",
]
