"""Toy-scale grid-style networks: Siamese encoder, fusion, causal extraction."""

from .blocks import (
    ChannelLayerNorm,
    CrossAttentionFusion,
    FiLMFusion,
    FrameLayerNorm,
    GridBlock,
    SelfAttentionLayer,
)
from .bundle import (
    FORMAT_VERSION,
    Hyperparams,
    ModelBundle,
    checkpoint_hash,
    paper_hyperparams,
    tiny_hyperparams,
    toy_hyperparams,
)
from .networks import EncoderFusion, EnrollmentEncoder, ExtractionBranch, pool_time
from .ops import (
    EmbeddingSequence,
    Origin,
    condition_from_enrollments,
    encode_enrollment,
    encoder_fusion,
    extract,
    film_fusion_variant,
    gridnet_block,
    pool_embedding,
    pseudo_negative,
    target_confusion_similarity,
)
from .spectral_torch import istft_t, stft_t

__all__ = [
    "ChannelLayerNorm",
    "CrossAttentionFusion",
    "EmbeddingSequence",
    "EncoderFusion",
    "EnrollmentEncoder",
    "ExtractionBranch",
    "FiLMFusion",
    "FORMAT_VERSION",
    "FrameLayerNorm",
    "GridBlock",
    "Hyperparams",
    "ModelBundle",
    "Origin",
    "SelfAttentionLayer",
    "checkpoint_hash",
    "condition_from_enrollments",
    "encode_enrollment",
    "encoder_fusion",
    "extract",
    "film_fusion_variant",
    "gridnet_block",
    "istft_t",
    "paper_hyperparams",
    "pool_embedding",
    "pool_time",
    "pseudo_negative",
    "stft_t",
    "target_confusion_similarity",
    "tiny_hyperparams",
    "toy_hyperparams",
]
