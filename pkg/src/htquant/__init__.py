"""Hadamard-transform variable-resolution pixel quantization."""

from .calibrate import BitAllocation, alpha_from_sigmas, calibrate_dataset, channel_sigma
from .codec import CodedImage, decode, encode, transcode_baseline
from .metrics import psnr, ssim
from .quantize import baseline_quantize, bpp, dequantize_channel, quantize_channel
from .transform import ChannelPlanes, forward_rows, hadamard_matrix, inverse_rows

__version__ = "0.1.0"

__all__ = [
    "BitAllocation",
    "ChannelPlanes",
    "CodedImage",
    "alpha_from_sigmas",
    "baseline_quantize",
    "bpp",
    "calibrate_dataset",
    "channel_sigma",
    "decode",
    "dequantize_channel",
    "encode",
    "forward_rows",
    "hadamard_matrix",
    "inverse_rows",
    "psnr",
    "quantize_channel",
    "ssim",
    "transcode_baseline",
]
