"""Embeddings of small graphs on surfaces: genus search, edge-maximality and certified constructions."""

from .embedding import RotationEmbedding, SurfaceSpec
from .graphcore import Graph

__all__ = ["Graph", "RotationEmbedding", "SurfaceSpec"]
__version__ = "0.1.0"
