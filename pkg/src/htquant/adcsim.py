"""Behavioral model of the four-channel pipelined ADC with an EHT first stage.

Each channel's first stage samples four pixels onto a switched-capacitor
network that applies one Hadamard row and the channel gain, makes a 1.5-bit
decision and hands the amplified residue to an ideal back-end quantizer.
Residues come from charge conservation on the actual (possibly mismatched)
capacitor values; a finite op-amp gain enters as a static closed-loop error.

Pixel voltages are ``x * V_ref`` with ``x`` the normalized pixel value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .calibrate import BitAllocation
from .codec import CodedImage, assemble, decode
from .errors import BackendBitsNegative
from .metrics import psnr
from .quantize import BIPOLAR, ChannelCodes, channel_range, dequantize_channel, quantize_channel
from .transform import clip_width, hadamard_matrix

M_EHT = 4
H4 = hadamard_matrix(M_EHT).astype(np.float64)
DEFAULT_CS = 100e-15
MISMATCH_CLIP = 5.0
BOLTZMANN = 1.38e-23


def _gain_linear(db: float) -> float:
    return math.inf if math.isinf(db) else 10.0 ** (db / 20.0)


@dataclass
class EhtCircuit:
    """Capacitor values and op-amp gain of one channel's EHT stage.

    ``mdac_sampling``   four input caps, nominal ``(1+P_j) Cs`` (``Cs`` on channel 0)
    ``mdac_reference``  caps driven by ``k V_ref`` while amplifying; on channel 0
                        these are input caps 0 and 1, elsewhere a dedicated ``Cs``
    ``feedback``        ``2 Cs`` on channel 0, ``Cs`` elsewhere
    ``subadc_sampling`` four comparator-side input caps, nominal ``(1+Q_j) Cs``
    ``subadc_threshold`` unit cap setting the ``V_ref/4`` decision level
    """

    channel: int
    alpha: int
    bits: int
    Cs: float = DEFAULT_CS
    V_ref: float = 1.0
    opamp_gain_db: float = math.inf
    mdac_sampling: np.ndarray = None
    mdac_reference: np.ndarray = None
    feedback: float = None
    subadc_sampling: np.ndarray = None
    subadc_threshold: float = None
    cap_mismatch: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.channel < M_EHT:
            raise ValueError(f"EHT channel index must be in 0..3, got {self.channel}")
        if self.channel == 0 and self.alpha != 0:
            raise ValueError("channel 0 has unit gain (alpha = 0)")
        if self.bits < 0:
            raise BackendBitsNegative(f"channel resolution {self.bits} is negative")
        nominal = self.nominal_caps()
        for name, value in nominal.items():
            if getattr(self, name) is None:
                setattr(self, name, value)

    @property
    def beta(self) -> float:
        return 2.0**self.alpha / M_EHT

    @property
    def P(self) -> float:
        return 2 * self.beta - 1

    @property
    def Q(self) -> float:
        return 4 * self.beta - 1

    @property
    def backend_bits(self) -> int:
        return self.bits - 1

    @property
    def signs(self) -> np.ndarray:
        return H4[self.channel]

    def nominal_caps(self) -> dict:
        cs = self.Cs
        if self.channel == 0:
            sampling = np.full(M_EHT, cs)
            reference = np.empty(0)
            cf = 2 * cs
        else:
            sampling = np.full(M_EHT, (1 + self.P) * cs)
            reference = np.array([cs])
            cf = cs
        return {
            "mdac_sampling": sampling,
            "mdac_reference": reference,
            "feedback": cf,
            "subadc_sampling": np.full(M_EHT, (1 + self.Q) * cs),
            "subadc_threshold": cs,
        }

    @classmethod
    def ideal(cls, channel: int, alpha: int, bits: int, **kw) -> "EhtCircuit":
        return cls(channel=channel, alpha=alpha, bits=bits, **kw)

    @classmethod
    def with_mismatch(cls, channel: int, alpha: int, bits: int, sigma: float,
                      rng: np.random.Generator, subadc: bool = True, **kw) -> "EhtCircuit":
        """Draw one multiplicative Gaussian error per physical capacitor.

        Draws are clipped at five sigma. The number and order of draws is fixed,
        so ``subadc=False`` still consumes the sub-ADC draws.
        """
        c = cls(channel=channel, alpha=alpha, bits=bits, **kw)
        eps = {}
        for name in ("mdac_sampling", "mdac_reference", "feedback", "subadc_sampling", "subadc_threshold"):
            nominal = np.asarray(getattr(c, name), dtype=np.float64)
            e = rng.normal(0.0, sigma, size=nominal.shape) if sigma > 0 else np.zeros(nominal.shape)
            e = np.clip(e, -MISMATCH_CLIP * sigma, MISMATCH_CLIP * sigma)
            if name.startswith("subadc") and not subadc:
                e = np.zeros(nominal.shape)
            eps[name] = e
            value = nominal * (1.0 + e)
            setattr(c, name, float(value) if nominal.ndim == 0 else value)
        c.cap_mismatch = eps
        return c

    def reference_capacitance(self) -> float:
        if self.channel == 0:
            return float(self.mdac_sampling[0] + self.mdac_sampling[1])
        return float(np.sum(self.mdac_reference))

    def connected_capacitance(self) -> float:
        """Capacitance on the summing node besides the feedback cap."""
        return float(np.sum(self.mdac_sampling) + np.sum(self.mdac_reference))

    def feedback_factor(self) -> float:
        return self.feedback / (self.feedback + self.connected_capacitance())

    def closed_loop_factor(self) -> float:
        A = _gain_linear(self.opamp_gain_db)
        if math.isinf(A):
            return 1.0
        af = A * self.feedback_factor()
        return af / (1.0 + af)


@dataclass(frozen=True)
class StageOutput:
    k: np.ndarray
    v_res: np.ndarray


def comparator_voltage(x4, circuit: EhtCircuit) -> np.ndarray:
    """Gain-scaled transformed sample seen by the sub-ADC comparators.

    The sampled charge ``sum_i h_i C_i x_i V_ref`` is referred to the threshold
    cap, ``v = Q / (4 C_th)``; nominally ``v = beta_j * (h_j . x) * V_ref``.
    """
    x = np.asarray(x4, dtype=np.float64)
    charge = (x * circuit.V_ref) @ (circuit.signs * circuit.subadc_sampling)
    return charge / (M_EHT * circuit.subadc_threshold)


def subadc_decide(x4, circuit: EhtCircuit) -> np.ndarray:
    """1.5-bit decision against ``+-V_ref/4``: -1, 0 or +1."""
    v = comparator_voltage(x4, circuit)
    th = circuit.V_ref / 4
    return np.where(v > th, 1, np.where(v < -th, -1, 0)).astype(np.int8)


def eht_stage(x4, circuit: EhtCircuit, noise_rng: np.random.Generator | None = None,
              temperature: float = 300.0) -> StageOutput:
    """Sub-ADC decision and MDAC residue for one or many 4-pixel segments.

    Charge balance between the sampling and amplification phases gives
    ``V_res = (sum_i h_i C_i x_i V_ref - k V_ref C_ref) / C_f``, scaled by the
    closed-loop factor ``A f / (1 + A f)``. ``noise_rng`` adds kT/C noise of the
    sampled charge.
    """
    x = np.asarray(x4, dtype=np.float64)
    k = subadc_decide(x, circuit)
    sampled = (x * circuit.V_ref) @ (circuit.signs * circuit.mdac_sampling)
    if noise_rng is not None:
        q_noise = math.sqrt(BOLTZMANN * temperature * circuit.connected_capacitance())
        sampled = sampled + noise_rng.normal(0.0, q_noise, size=np.shape(sampled))
    held = k * circuit.V_ref * circuit.reference_capacitance()
    v_res = (sampled - held) / circuit.feedback * circuit.closed_loop_factor()
    return StageOutput(k=k, v_res=v_res)


def backend_quantize(v_res, backend_bits: int, V_ref: float = 1.0) -> np.ndarray:
    """Ideal back-end: ``backend_bits`` uniform over ``[-V_ref, V_ref]``, saturating."""
    if backend_bits < 0:
        raise BackendBitsNegative(f"back-end resolution {backend_bits} is negative")
    v = np.asarray(v_res, dtype=np.float64) / V_ref
    if backend_bits == 0:
        return np.zeros_like(v)
    codes = quantize_channel(v, backend_bits, BIPOLAR)
    return dequantize_channel(codes, backend_bits, BIPOLAR) * V_ref


def stage_estimate(x4, circuit: EhtCircuit, **kw) -> np.ndarray:
    """Digitally corrected estimate ``(k V_ref + v_res_hat) / 2`` of the channel value."""
    out = eht_stage(x4, circuit, **kw)
    r_hat = backend_quantize(out.v_res, circuit.backend_bits, circuit.V_ref)
    return (out.k * circuit.V_ref + r_hat) / 2


def pipeline_digitize(x4, circuit: EhtCircuit, **kw):
    """N_j-bit code of the stage estimate in the channel's declared range.

    Returns ``None`` for an eliminated (0-bit) channel.
    """
    if circuit.bits == 0:
        return None
    v_hat = stage_estimate(x4, circuit, **kw) / circuit.V_ref
    return quantize_channel(v_hat, circuit.bits, channel_range(circuit.channel))


def ideal_circuits(cfg: BitAllocation, **kw) -> list:
    _check_cfg(cfg)
    return [EhtCircuit.ideal(j, cfg.alphas[j], cfg.bits[j], **kw) for j in range(M_EHT)]


def mismatched_circuits(cfg: BitAllocation, sigma: float, rng: np.random.Generator,
                        subadc: bool = True, **kw) -> list:
    _check_cfg(cfg)
    return [EhtCircuit.with_mismatch(j, cfg.alphas[j], cfg.bits[j], sigma, rng, subadc=subadc, **kw)
            for j in range(M_EHT)]


def _check_cfg(cfg: BitAllocation):
    if cfg.M != M_EHT:
        raise ValueError(f"the EHT simulator is four-channel, got M={cfg.M}")


def digitize_plane(plane, cfg: BitAllocation, circuits, noise_rng=None) -> ChannelCodes:
    seg = clip_width(np.asarray(plane, dtype=np.float64), M_EHT)
    h, w = seg.shape
    seg = seg.reshape(h, w // M_EHT, M_EHT)
    codes = [pipeline_digitize(seg, c, noise_rng=noise_rng) for c in circuits]
    return ChannelCodes(bits=tuple(cfg.bits), codes=codes, height=h, width_segments=w // M_EHT)


def digitize_image(img, cfg: BitAllocation, circuits, noise_rng=None) -> CodedImage:
    """Push every four-pixel row segment through the channel circuits."""
    _check_cfg(cfg)
    if len(circuits) != M_EHT:
        raise ValueError("need one circuit per channel")
    for j, c in enumerate(circuits):
        if c.channel != j or c.bits != cfg.bits[j] or c.alpha != cfg.alphas[j]:
            raise ValueError(f"circuit {j} does not match the bit allocation")
    img = np.asarray(img, dtype=np.float64)
    planes = [img] if img.ndim == 2 else [img[..., c] for c in range(img.shape[2])]
    codes = [digitize_plane(p, cfg, circuits, noise_rng) for p in planes]
    return assemble(codes, planes[0].shape[1], cfg)


# -- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloReport:
    trials: int
    psnr_samples: np.ndarray
    seed: int
    mismatch_sigma: float
    opamp_gain_db: float
    ideal_psnr: float

    @property
    def spread(self) -> float:
        return float(self.psnr_samples.max() - self.psnr_samples.min())

    @property
    def mean(self) -> float:
        return float(self.psnr_samples.mean())

    def histogram(self, bins: int = 20):
        counts, edges = np.histogram(self.psnr_samples, bins=bins)
        return edges, counts

    def rows(self):
        return [(i, float(p)) for i, p in enumerate(self.psnr_samples)]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial, fixed by ``(seed, trial)`` alone."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def run_trial(img, cfg, trial: int, seed: int, mismatch_sigma: float, opamp_gain_db: float,
              subadc_mismatch: bool = True, thermal_noise: bool = False) -> float:
    rng = trial_rng(seed, trial)
    circuits = mismatched_circuits(cfg, mismatch_sigma, rng, subadc=subadc_mismatch,
                                   opamp_gain_db=opamp_gain_db)
    noise_rng = rng if thermal_noise else None
    rec = decode(digitize_image(img, cfg, circuits, noise_rng=noise_rng))
    return psnr(clip_width(img, M_EHT), rec)


def monte_carlo(img, cfg: BitAllocation, trials: int = 1000, mismatch_sigma: float = 0.01,
                opamp_gain_db: float = 40.0, seed: int = 0, workers: int = 1,
                subadc_mismatch: bool = True, thermal_noise: bool = False) -> MonteCarloReport:
    """PSNR of the reconstructed image over independent mismatch draws."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    img = np.asarray(img, dtype=np.float64)

    def one(t):
        return run_trial(img, cfg, t, seed, mismatch_sigma, opamp_gain_db,
                         subadc_mismatch, thermal_noise)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(one, range(trials)))
    else:
        samples = [one(t) for t in range(trials)]
    ideal = psnr(clip_width(img, M_EHT), decode(digitize_image(img, cfg, ideal_circuits(cfg))))
    return MonteCarloReport(trials=trials, psnr_samples=np.asarray(samples), seed=seed,
                            mismatch_sigma=mismatch_sigma, opamp_gain_db=opamp_gain_db,
                            ideal_psnr=ideal)
