"""Quantum state randomization with shareable encryption keys: exact small-instance laboratory."""

from .errors import ConsistencyError, GuardError
from .gf2 import BitMatrix, BitVector, RankDistribution, rank, rank_distribution
from .kernels import BACKEND
from .qsr_core import (
    CipherInstance,
    KeyInstance,
    SchemeParams,
    adversary_state,
    averaged_cipher,
    cipher_state,
    decrypt,
    encrypt_instance,
    encryption_key_state,
    keygen,
    sample_key_instance,
)
from .qstate import DensityOperator, DiagonalState, entropy, trace_distance, trace_norm
from .rng import SplitMix64

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BitMatrix",
    "BitVector",
    "CipherInstance",
    "ConsistencyError",
    "DensityOperator",
    "DiagonalState",
    "GuardError",
    "KeyInstance",
    "RankDistribution",
    "SchemeParams",
    "SplitMix64",
    "adversary_state",
    "averaged_cipher",
    "cipher_state",
    "decrypt",
    "encrypt_instance",
    "encryption_key_state",
    "entropy",
    "keygen",
    "rank",
    "rank_distribution",
    "sample_key_instance",
    "trace_distance",
    "trace_norm",
]
