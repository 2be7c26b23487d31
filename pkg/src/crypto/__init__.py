"""Pairing-based building blocks: groups, certificates, primitives and proofs."""

from .loader import CurveDescriptor, CurveLoader
from .pairing import (
    PointG1,
    PointG2,
    PointGT,
    PublicParams,
    bsgs_dlog,
    hash_to_scalar,
    pairing,
    setup,
)

__all__ = [
    "CurveDescriptor",
    "CurveLoader",
    "PointG1",
    "PointG2",
    "PointGT",
    "PublicParams",
    "bsgs_dlog",
    "hash_to_scalar",
    "pairing",
    "setup",
]
