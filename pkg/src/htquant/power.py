"""Closed-form ADC power models and the figures normalized to an 8-bit ADC."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import BitsOutOfRange

BOLTZMANN = 1.38e-23
PIPELINED = "pipelined"
SAR = "sar"
KINDS = (PIPELINED, SAR)
REFERENCE_BITS = 8


@dataclass(frozen=True)
class AdcParams:
    """Circuit constants; defaults are the 90 nm, 50 MS/s operating point."""

    f_s: float = 50e6
    V_ref: float = 1.0
    V_eff: float = 0.1
    C_min: float = 1e-15
    C_unit: float = 4.8e-15
    T: float = 300.0
    k_B: float = BOLTZMANN

    def __post_init__(self):
        for name in ("f_s", "V_ref", "V_eff", "C_min", "C_unit", "T", "k_B"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.V_eff < self.V_ref:
            raise ValueError("V_eff must be smaller than V_ref")

    def with_overrides(self, **kw) -> "AdcParams":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT_PARAMS = AdcParams()


def sampling_power(enob: int, p: AdcParams = DEFAULT_PARAMS) -> float:
    """Thermal-noise floor ``48 k T f_s 2**(2 ENOB)`` in watts."""
    if enob < 1:
        raise BitsOutOfRange(f"ENOB must be >= 1, got {enob}")
    return 48.0 * p.k_B * p.T * p.f_s * 4.0**enob


def pipelined_power(N: int, p: AdcParams = DEFAULT_PARAMS) -> float:
    """Noise-limited 1.5-bit/stage pipeline plus the process-limited term."""
    if N < 2:
        raise BitsOutOfRange(f"pipelined model needs N >= 2, got {N}")
    v_fs = p.V_ref
    ln2 = math.log(2.0)
    p_pn = 9.0 * (1.0 + 2.0 * N * (p.V_eff / v_fs) * ln2) * sampling_power(N, p)
    p_proc = 2.0 * N * p.C_min * v_fs**2 * p.f_s * (1.0 + 6.0 * N * (p.V_eff / v_fs) * ln2)
    return p_pn + p_proc


def sar_coefficient(N: int) -> float:
    # sum_{i=1}^{N-1} 2**(N-2-i); the last term is 2**-1
    return sum(2.0 ** (N - 2 - i) for i in range(1, N))


def sar_power(N: int, p: AdcParams = DEFAULT_PARAMS) -> float:
    """Capacitive-DAC switching power of an N-bit SAR converter."""
    if N < 2:
        raise BitsOutOfRange(f"SAR model needs N >= 2, got {N}")
    return p.f_s * sar_coefficient(N) * p.C_unit * p.V_ref**2


def adc_power(N: int, kind: str = PIPELINED, p: AdcParams = DEFAULT_PARAMS) -> float:
    if kind == PIPELINED:
        return pipelined_power(N, p)
    if kind == SAR:
        return sar_power(N, p)
    raise ValueError(f"unknown ADC kind {kind!r}")


def normalized_power(N: int, kind: str = PIPELINED, p: AdcParams = DEFAULT_PARAMS) -> float:
    return adc_power(N, kind, p) / adc_power(REFERENCE_BITS, kind, p)


def power_table(kind: str = PIPELINED, p: AdcParams = DEFAULT_PARAMS, bits=range(8, 1, -1)) -> dict:
    """``{N: normalized power}`` in the column order of the comparison table."""
    return {N: normalized_power(N, kind, p) for N in bits}


@dataclass(frozen=True)
class MultiChannelPower:
    total_normalized: float
    per_channel_normalized: float
    channels: tuple


def multi_channel_power(bits, kind: str = PIPELINED, p: AdcParams = DEFAULT_PARAMS) -> MultiChannelPower:
    """Sum of per-channel ADC powers, each relative to one 8-bit ADC.

    Eliminated channels (0 bits) cost nothing.
    """
    bits = [int(b) for b in bits]
    chans = []
    for n in bits:
        if n == 0:
            chans.append(0.0)
        elif 2 <= n <= 16:
            chans.append(normalized_power(n, kind, p))
        else:
            raise BitsOutOfRange(f"channel resolution {n} must be 0 or in [2, 16]")
    total = sum(chans)
    return MultiChannelPower(total_normalized=total,
                             per_channel_normalized=total / len(bits),
                             channels=tuple(chans))


def io_and_memory_normalized(bpp) -> dict:
    """Transmit energy and storage, both proportional to bits per pixel."""
    bpp = float(bpp)
    if not 0 < bpp <= 8:
        raise ValueError(f"bpp must be in (0, 8], got {bpp}")
    return {"io_energy": bpp / 8.0, "memory": bpp / 8.0}
