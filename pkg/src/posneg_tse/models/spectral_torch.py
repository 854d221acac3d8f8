"""Torch STFT/ISTFT mirroring the package's analysis conventions.

Same windowing as the numpy implementation (square-root periodic Hann,
hop = window/2, no padding). ISTFT is hand-rolled overlap-add because the
zero first window sample violates torch.istft's envelope check.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F


def sqrt_hann_t(window_size: int, dtype=torch.float32, device=None) -> torch.Tensor:
    n = torch.arange(window_size, dtype=dtype, device=device)
    return torch.sqrt(0.5 * (1.0 - torch.cos(2.0 * torch.pi * n / window_size)))


def stft_t(x: torch.Tensor, window_size: int, hop: int) -> torch.Tensor:
    """[..., n] real -> [..., T, F] complex; frames = (n - window)//hop + 1."""
    win = sqrt_hann_t(window_size, dtype=x.dtype, device=x.device)
    shape = x.shape
    spec = torch.stft(x.reshape(-1, shape[-1]), n_fft=window_size, hop_length=hop,
                      win_length=window_size, window=win, center=False,
                      return_complex=True, onesided=True)
    spec = spec.transpose(-1, -2)  # [N, T, F]
    return spec.reshape(*shape[:-1], spec.shape[-2], spec.shape[-1])


def istft_t(spec: torch.Tensor, window_size: int, hop: int) -> torch.Tensor:
    """[..., T, F] complex -> [..., n] real with n = window + (T-1)*hop."""
    shape = spec.shape
    T = shape[-2]
    flat = spec.reshape(-1, T, shape[-1])
    frames = torch.fft.irfft(flat, n=window_size, dim=-1)  # [N, T, W]
    win = sqrt_hann_t(window_size, dtype=frames.dtype, device=frames.device)
    frames = frames * win
    n_out = window_size + (T - 1) * hop
    out = F.fold(frames.transpose(1, 2), output_size=(n_out, 1),
                 kernel_size=(window_size, 1), stride=(hop, 1))[:, 0, :, 0]
    env = F.fold((win ** 2).expand(1, T, window_size).transpose(1, 2),
                 output_size=(n_out, 1), kernel_size=(window_size, 1),
                 stride=(hop, 1))[:, 0, :, 0]
    out = out / env.clamp_min(1e-12)
    return out.reshape(*shape[:-2], n_out)
