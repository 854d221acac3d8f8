"""Network building blocks: grid blocks, attention layers, fusion modules.

Feature maps are laid out [B, C, T, F] (channels, STFT frames, frequency
bins). Causal variants restrict every temporal operation to frames <= t:
unidirectional temporal recurrence, causally masked attention, and
normalizations whose statistics never pool over time.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F


class ChannelLayerNorm(nn.Module):
    """LayerNorm over the channel axis only (per time-frequency position)."""

    def __init__(self, channels: int, eps: float = 1e-5):
        super().__init__()
        self.gamma = nn.Parameter(torch.ones(1, channels, 1, 1))
        self.beta = nn.Parameter(torch.zeros(1, channels, 1, 1))
        self.eps = eps

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        mu = x.mean(dim=1, keepdim=True)
        var = x.var(dim=1, unbiased=False, keepdim=True)
        return (x - mu) / torch.sqrt(var + self.eps) * self.gamma + self.beta


class FrameLayerNorm(nn.Module):
    """LayerNorm over channel and frequency per frame (causal-safe)."""

    def __init__(self, channels: int, n_freq: int, eps: float = 1e-5):
        super().__init__()
        self.gamma = nn.Parameter(torch.ones(1, channels, 1, n_freq))
        self.beta = nn.Parameter(torch.zeros(1, channels, 1, n_freq))
        self.eps = eps

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        mu = x.mean(dim=(1, 3), keepdim=True)
        var = x.var(dim=(1, 3), unbiased=False, keepdim=True)
        return (x - mu) / torch.sqrt(var + self.eps) * self.gamma + self.beta


class GridBlock(nn.Module):
    """One time-frequency grid block.

    Frequency-direction BiLSTM, time-direction LSTM (bidirectional in
    ``bidirectional`` mode, unidirectional in causal mode), then a
    full-band self-attention over frames, each with a residual connection.
    """

    def __init__(self, channels: int, hidden: int, heads: int, n_freq: int,
                 qk_channels: int = 4, causal: bool = False):
        super().__init__()
        if channels % heads != 0:
            raise ValueError("heads must divide channels")
        self.causal = causal
        self.channels = channels
        self.heads = heads
        self.n_freq = n_freq

        self.freq_norm = ChannelLayerNorm(channels)
        self.freq_rnn = nn.LSTM(channels, hidden, batch_first=True, bidirectional=True)
        self.freq_proj = nn.Linear(2 * hidden, channels)

        self.time_norm = ChannelLayerNorm(channels)
        self.time_rnn = nn.LSTM(channels, hidden, batch_first=True,
                                bidirectional=not causal)
        self.time_proj = nn.Linear(hidden if causal else 2 * hidden, channels)

        v_ch = channels // heads
        self.q_convs = nn.ModuleList()
        self.k_convs = nn.ModuleList()
        self.v_convs = nn.ModuleList()
        for _ in range(heads):
            self.q_convs.append(self._qkv_head(channels, qk_channels, n_freq))
            self.k_convs.append(self._qkv_head(channels, qk_channels, n_freq))
            self.v_convs.append(self._qkv_head(channels, v_ch, n_freq))
        self.attn_proj = self._qkv_head(channels, channels, n_freq)

    @staticmethod
    def _qkv_head(in_ch: int, out_ch: int, n_freq: int) -> nn.Sequential:
        return nn.Sequential(
            nn.Conv2d(in_ch, out_ch, 1), nn.PReLU(), FrameLayerNorm(out_ch, n_freq))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        B, C, T, Fq = x.shape

        y = self.freq_norm(x)
        y = y.permute(0, 2, 3, 1).reshape(B * T, Fq, C)
        y, _ = self.freq_rnn(y)
        y = self.freq_proj(y)
        y = y.reshape(B, T, Fq, C).permute(0, 3, 1, 2)
        x = x + y

        y = self.time_norm(x)
        y = y.permute(0, 3, 2, 1).reshape(B * Fq, T, C)
        y, _ = self.time_rnn(y)
        y = self.time_proj(y)
        y = y.reshape(B, Fq, T, C).permute(0, 3, 2, 1)
        x = x + y

        q = torch.cat([conv(x) for conv in self.q_convs], dim=0)  # [heads*B, E, T, F]
        k = torch.cat([conv(x) for conv in self.k_convs], dim=0)
        v = torch.cat([conv(x) for conv in self.v_convs], dim=0)
        q = q.transpose(1, 2).flatten(2)  # [heads*B, T, E*F]
        k = k.transpose(1, 2).flatten(2)
        v_shape = v.transpose(1, 2).shape
        v = v.transpose(1, 2).flatten(2)

        attn = q @ k.transpose(1, 2) / math.sqrt(q.shape[-1])  # [heads*B, T, T]
        if self.causal:
            mask = torch.triu(torch.ones(T, T, dtype=torch.bool, device=x.device), 1)
            attn = attn.masked_fill(mask, float("-inf"))
        attn = F.softmax(attn, dim=-1)
        out = (attn @ v).reshape(v_shape).transpose(1, 2)  # [heads*B, C/h, T, F]
        out = out.reshape(self.heads, B, C // self.heads, T, Fq)
        out = out.transpose(0, 1).reshape(B, C, T, Fq)
        return x + self.attn_proj(out)


class SelfAttentionLayer(nn.Module):
    """Pre-norm multi-head self-attention over a [B, T, D] sequence."""

    def __init__(self, dim: int, heads: int, head_dim: int):
        super().__init__()
        self.heads = heads
        self.head_dim = head_dim
        self.norm = nn.LayerNorm(dim)
        self.q = nn.Linear(dim, heads * head_dim)
        self.k = nn.Linear(dim, heads * head_dim)
        self.v = nn.Linear(dim, heads * head_dim)
        self.out = nn.Linear(heads * head_dim, dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        B, T, _ = x.shape
        y = self.norm(x)

        def split(t: torch.Tensor) -> torch.Tensor:
            return t.reshape(B, T, self.heads, self.head_dim).transpose(1, 2)

        q, k, v = split(self.q(y)), split(self.k(y)), split(self.v(y))
        attn = F.softmax(q @ k.transpose(-1, -2) / math.sqrt(self.head_dim), dim=-1)
        z = (attn @ v).transpose(1, 2).reshape(B, T, -1)
        return x + self.out(z)


class CrossAttentionFusion(nn.Module):
    """Inject conditioning into extraction features via cross-attention.

    The flattened frame (C*F) queries the pooled enrollment embedding,
    which serves as key and value; the conditioning is fixed before
    extraction, so no causal mask applies on that axis.
    """

    def __init__(self, channels: int, n_freq: int, cond_dim: int,
                 heads: int, head_dim: int):
        super().__init__()
        frame_dim = channels * n_freq
        self.heads = heads
        self.head_dim = head_dim
        self.norm = nn.LayerNorm(frame_dim)
        self.q = nn.Linear(frame_dim, heads * head_dim)
        self.k = nn.Linear(cond_dim, heads * head_dim)
        self.v = nn.Linear(cond_dim, heads * head_dim)
        self.out = nn.Linear(heads * head_dim, frame_dim)

    def forward(self, x: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        B, C, T, Fq = x.shape
        Tc = cond.shape[1]
        frames = x.permute(0, 2, 1, 3).reshape(B, T, C * Fq)
        q = self.q(self.norm(frames)).reshape(B, T, self.heads, self.head_dim).transpose(1, 2)
        k = self.k(cond).reshape(B, Tc, self.heads, self.head_dim).transpose(1, 2)
        v = self.v(cond).reshape(B, Tc, self.heads, self.head_dim).transpose(1, 2)
        attn = F.softmax(q @ k.transpose(-1, -2) / math.sqrt(self.head_dim), dim=-1)
        z = (attn @ v).transpose(1, 2).reshape(B, T, -1)
        y = frames + self.out(z)
        return y.reshape(B, T, C, Fq).permute(0, 2, 1, 3)


class FiLMFusion(nn.Module):
    """Per-channel affine modulation from the time-averaged conditioning.

    Initialized to the identity (scale 1, shift 0) so an untrained fusion
    leaves the extraction features untouched.
    """

    def __init__(self, channels: int, cond_dim: int):
        super().__init__()
        self.scale = nn.Linear(cond_dim, channels)
        self.shift = nn.Linear(cond_dim, channels)
        nn.init.zeros_(self.scale.weight)
        nn.init.ones_(self.scale.bias)
        nn.init.zeros_(self.shift.weight)
        nn.init.zeros_(self.shift.bias)

    def forward(self, x: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        vec = cond.mean(dim=1)  # [B, D]
        s = self.scale(vec)[:, :, None, None]
        b = self.shift(vec)[:, :, None, None]
        return x * s + b
