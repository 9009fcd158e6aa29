"""MBIOS channels: sampling, log-likelihood ratios, and LLR distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BSC = "bsc"
AWGN = "awgn"

RAW = "raw"
RESCALED = "rescaled"

_CONVENTIONS = (RAW, RESCALED)


@dataclass(frozen=True)
class ChannelModel:
    """A memoryless binary-input output-symmetric channel.

    kind "bsc": crossover probability p, 0 < p < 1/2.
    kind "awgn": noise variance sigma2 > 0 with unit-energy modulation
    y = 1 - 2x (bit 0 -> +1, bit 1 -> -1).

    Degenerate parameters (p = 0, sigma2 = 0) are rejected because LLRs and
    the analytic bounds diverge there.
    """

    kind: str
    p: float = 0.0
    sigma2: float = 0.0

    def __post_init__(self):
        if self.kind == BSC:
            if not 0.0 < self.p < 0.5:
                raise ValueError(f"bsc needs 0 < p < 1/2, got p={self.p}")
        elif self.kind == AWGN:
            if not self.sigma2 > 0.0:
                raise ValueError(f"awgn needs sigma2 > 0, got sigma2={self.sigma2}")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @property
    def param(self) -> float:
        """The scalar channel parameter (p for BSC, sigma2 for AWGN)."""
        return self.p if self.kind == BSC else self.sigma2

    @property
    def rescale_factor(self) -> float:
        """Positive constant with rescaled = raw * factor."""
        if self.kind == BSC:
            return 1.0 / math.log((1.0 - self.p) / self.p)
        return self.sigma2 / 2.0

    def sample(self, bits, rng: np.random.Generator):
        """Transmit ``bits`` over the channel, returning received symbols.

        BSC returns hard bits; AWGN returns real symbols y + noise.
        """
        bits = np.atleast_1d(np.asarray(bits, dtype=np.int8))
        if self.kind == BSC:
            flips = rng.random(bits.shape) < self.p
            return np.bitwise_xor(bits, flips.astype(np.int8))
        noise = rng.normal(0.0, math.sqrt(self.sigma2), bits.shape)
        return (1.0 - 2.0 * bits) + noise

    def llr(self, received, convention: str = RESCALED):
        """Per-symbol log-likelihood ratio ln P(r|0)/P(r|1) of the received symbols."""
        _check_convention(convention)
        received = np.atleast_1d(np.asarray(received))
        if self.kind == BSC:
            mag = 1.0 if convention == RESCALED else math.log((1.0 - self.p) / self.p)
            return np.where(received == 0, mag, -mag)
        y = received.astype(float)
        return y if convention == RESCALED else 2.0 * y / self.sigma2

    def llr_distribution(self, convention: str = RESCALED) -> "LlrDistribution":
        """Distribution of the LLR conditioned on transmitting bit 0."""
        _check_convention(convention)
        if self.kind == BSC:
            mag = 1.0 if convention == RESCALED else math.log((1.0 - self.p) / self.p)
            return LlrDistribution(
                kind="discrete_pmf",
                atoms=((mag, 1.0 - self.p), (-mag, self.p)),
            )
        if convention == RESCALED:
            return LlrDistribution(kind="gaussian", mean=1.0, variance=self.sigma2)
        return LlrDistribution(
            kind="gaussian", mean=2.0 / self.sigma2, variance=4.0 / self.sigma2
        )


def bsc(p: float) -> ChannelModel:
    return ChannelModel(BSC, p=float(p))


def awgn(sigma2: float) -> ChannelModel:
    return ChannelModel(AWGN, sigma2=float(sigma2))


@dataclass(frozen=True)
class LlrDistribution:
    """Distribution of a single LLR sample conditioned on bit 0.

    Either a discrete pmf (atoms of (value, probability)) or a gaussian
    (mean, variance).
    """

    kind: str
    atoms: tuple[tuple[float, float], ...] = ()
    mean: float = 0.0
    variance: float = 0.0

    def __post_init__(self):
        if self.kind == "discrete_pmf":
            if not self.atoms:
                raise ValueError("discrete_pmf needs at least one atom")
            total = math.fsum(p for _, p in self.atoms)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"pmf mass {total} != 1")
            if any(p < 0 for _, p in self.atoms):
                raise ValueError("negative probability atom")
        elif self.kind == "gaussian":
            if not self.variance > 0.0:
                raise ValueError("gaussian needs variance > 0")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    def cdf(self, z: float) -> float:
        """Pr(value <= z)."""
        if self.kind == "discrete_pmf":
            return math.fsum(p for v, p in self.atoms if v <= z)
        return 0.5 * math.erfc((self.mean - z) / math.sqrt(2.0 * self.variance))


@dataclass(frozen=True)
class LlrVector:
    """LLRs for one transmitted block, with the convention they were computed in."""

    values: np.ndarray
    convention: str = RESCALED

    def __post_init__(self):
        _check_convention(self.convention)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return len(self.values)


def llr_vector(channel: ChannelModel, received, convention: str = RESCALED) -> LlrVector:
    return LlrVector(channel.llr(received, convention), convention)


def _check_convention(convention: str):
    if convention not in _CONVENTIONS:
        raise ValueError(f"convention must be one of {_CONVENTIONS}, got {convention!r}")
