"""Exact FLOPs accounting for GEMMs and dense-transformer inference.

All counts are exact Python integers.  The closed forms (forward pass,
decode delta, batched decode step) and the per-GEMM layer walk agree
bit-for-bit; the layer walk exists as an independent cross-check of the
closed forms, not as a faster path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InfercostError
from .registry import ModelConfig


def _check_count(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InfercostError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InfercostError(f"{name} must be >= {minimum}, got {value}")
    return value


def _exact_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise InfercostError(f"{what} did not reduce to an integer: {value}")
    return int(value)


@dataclass(frozen=True)
class GemmShape:
    """Dimensions of C[M,N] = A[M,K] @ B[K,N]."""

    m: int
    k: int
    n: int

    def __post_init__(self):
        for field in ("m", "k", "n"):
            _check_count(getattr(self, field), field)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.k, self.n)


@dataclass(frozen=True)
class SequenceBatch:
    """Per-sequence context lengths (tokens already in the KV cache)."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(self.lengths)
        if len(lengths) < 1:
            raise InfercostError("a batch needs at least one sequence")
        for s in lengths:
            _check_count(s, "sequence length", minimum=0)
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def uniform(cls, batch: int, seqlen: int) -> "SequenceBatch":
        _check_count(batch, "batch")
        _check_count(seqlen, "seqlen", minimum=0)
        return cls(lengths=(seqlen,) * batch)

    @property
    def batch(self) -> int:
        return len(self.lengths)

    @property
    def total_context(self) -> int:
        return sum(self.lengths)


@dataclass(frozen=True)
class FlopsBreakdown:
    """One decode step split into its three closed-form terms."""

    linear: int
    lm_head: int
    attention: int

    @property
    def total(self) -> int:
        return self.linear + self.lm_head + self.attention


def gemm_flops(shape: GemmShape) -> int:
    """2*M*K*N: one multiply and one add per output element per K slice."""
    return 2 * shape.m * shape.k * shape.n


def forward_flops(model: ModelConfig, s: int) -> int:
    """Matmul FLOPs of a full forward pass over s tokens.

    2s(A h^2 l + v h) + 2 s^2 h l, where A = 3a + 2 + 2/g folds every
    linear projection of one layer into a single coefficient.
    """
    _check_count(s, "s", minimum=0)
    a = model.linear_constant
    h, l, v = model.hidden, model.layers, model.vocab
    total = 2 * s * (a * h * h * l + v * h) + 2 * s * s * h * l
    return _exact_int(Fraction(total), "forward FLOPs")


def decode_delta_flops(model: ModelConfig, s: int, t: int) -> int:
    """Extra FLOPs to extend a context of s tokens by t more.

    2t(A h^2 l + v h) + 4 s t h l: the forward-pass difference with the
    quadratic-in-t term dropped (exact error is 2 h l t^2).
    """
    _check_count(s, "s", minimum=0)
    _check_count(t, "t")
    a = model.linear_constant
    h, l, v = model.hidden, model.layers, model.vocab
    total = 2 * t * (a * h * h * l + v * h) + 4 * s * t * h * l
    return _exact_int(Fraction(total), "decode delta FLOPs")


def decode_step_flops(model: ModelConfig, batch: SequenceBatch) -> FlopsBreakdown:
    """FLOPs of one batched decode step (one new token per sequence).

    linear = 2 b A h^2 l and lm_head = 2 b v h are independent of context;
    attention = 4 h l * sum(s_i) grows with the cached context.
    """
    a = model.linear_constant
    h, l, v = model.hidden, model.layers, model.vocab
    b = batch.batch
    linear = _exact_int(Fraction(2 * b * a * h * h * l), "linear FLOPs")
    lm_head = 2 * b * v * h
    attention = 4 * h * l * batch.total_context
    return FlopsBreakdown(linear=linear, lm_head=lm_head, attention=attention)


def _layer_gemms(model: ModelConfig, s: int) -> Iterable[tuple[str, int]]:
    h = model.hidden
    kv_width = model.kv_heads * model.head_size
    inter = model.intermediate
    yield "q_proj", gemm_flops(GemmShape(s, h, h))
    yield "k_proj", gemm_flops(GemmShape(s, h, kv_width))
    yield "v_proj", gemm_flops(GemmShape(s, h, kv_width))
    yield "o_proj", gemm_flops(GemmShape(s, h, h))
    yield "gate_proj", gemm_flops(GemmShape(s, h, inter))
    yield "up_proj", gemm_flops(GemmShape(s, h, inter))
    yield "down_proj", gemm_flops(GemmShape(s, inter, h))
    # score and context GEMMs per query head, at the causal half cost the
    # closed form assumes (2*s*d*s is always even, so // is exact)
    d = model.head_size
    yield "attn_scores", model.heads * (gemm_flops(GemmShape(s, d, s)) // 2)
    yield "attn_context", model.heads * (gemm_flops(GemmShape(s, s, d)) // 2)


def layer_walk_flops(model: ModelConfig, s: int) -> int:
    """Forward-pass FLOPs by brute enumeration of every GEMM.

    Walks q/k/v/o, gate/up/down and the two attention GEMMs per layer plus
    the LM head, summing gemm_flops for each.  Agrees exactly with
    forward_flops; kept separate so either formula can audit the other.
    """
    _check_count(s, "s")
    per_layer = sum(flops for _, flops in _layer_gemms(model, s))
    lm_head = gemm_flops(GemmShape(s, model.hidden, model.vocab))
    return model.layers * per_layer + lm_head


def softmax_exp_ops(model: ModelConfig, b: int, s: int) -> int:
    """Exponential evaluations in one decode step: one per score, b*H*s."""
    _check_count(b, "b", minimum=0)
    _check_count(s, "s", minimum=0)
    return b * model.heads * s
