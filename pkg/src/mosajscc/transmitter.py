"""Sensor pair -> quantized gate voltage -> encoded drain current."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import MosfetParams, curve_gain, ids_forward
from .errors import ConfigError
from .precircuit import QuantizerConfig, quantize


@dataclass(frozen=True)
class SensorPair:
    y_raw: float  # becomes Vgs,in
    x_raw: float  # used directly as Vds


@dataclass(frozen=True)
class Truth:
    vgs_level: float
    vds: float


@dataclass(frozen=True)
class EncodedSample:
    """One transmitted current.

    ``segment`` is the framing index of the curve sweep the sample belongs
    to; the receiver only pairs samples inside one segment.  ``truth`` is
    for scoring and is never read by the decoder.
    """

    ids: float
    segment: int = 0
    truth: Truth | None = None


def encode(pair: SensorPair, cfg: QuantizerConfig, p: MosfetParams, segment: int = 0) -> EncodedSample:
    return _encode_at(quantize(pair.y_raw, cfg), pair.x_raw, p, segment)


def _encode_at(vgs: float, vds: float, p: MosfetParams, segment: int) -> EncodedSample:
    return EncodedSample(ids_forward(p, vgs, vds), segment, Truth(vgs, vds))


def vds_sweep(vds_min: float, vds_max: float, vds_step: float, include_endpoint: bool = True) -> list[float]:
    """Vds values from vds_min in steps of vds_step, rounded to suppress float drift."""
    if not vds_max > vds_min:
        raise ConfigError(f"empty Vds range [{vds_min}, {vds_max}]")
    if not vds_step > 0:
        raise ConfigError(f"Vds step must be > 0, got {vds_step}")
    n = int(np.floor((vds_max - vds_min) / vds_step + 1e-9)) + 1
    vals = [round(vds_min + k * vds_step, 12) for k in range(n)]
    if not include_endpoint and len(vals) > 1 and abs(vals[-1] - vds_max) < 1e-9:
        vals.pop()
    if len(vals) < 2:
        raise ConfigError("Vds sweep needs at least two points per curve")
    return vals


def make_eval_grid(
    cfg: QuantizerConfig,
    vds_min: float,
    vds_max: float,
    vds_step: float,
    include_endpoint: bool = True,
) -> list[list[SensorPair]]:
    """One Vds-ascending sweep per gate level, curves in ascending level order."""
    vds = vds_sweep(vds_min, vds_max, vds_step, include_endpoint)
    return [[SensorPair(v, x) for x in vds] for v in cfg.levels()]


@dataclass
class SampleBlock:
    """Column form of an encoded stream, used by the sweep harness."""

    ids: np.ndarray
    segment: np.ndarray
    vgs: np.ndarray  # truth
    vds: np.ndarray  # truth

    def __len__(self):
        return len(self.ids)

    @classmethod
    def from_samples(cls, samples: list[EncodedSample]) -> "SampleBlock":
        if any(s.truth is None for s in samples):
            raise ConfigError("samples carry no truth")
        return cls(
            np.array([s.ids for s in samples], dtype=np.float64),
            np.array([s.segment for s in samples], dtype=np.int64),
            np.array([s.truth.vgs_level for s in samples], dtype=np.float64),
            np.array([s.truth.vds for s in samples], dtype=np.float64),
        )

    def to_samples(self) -> list[EncodedSample]:
        return [
            EncodedSample(float(i), int(g), Truth(float(v), float(x)))
            for i, g, v, x in zip(self.ids, self.segment, self.vgs, self.vds)
        ]


def encode_block(
    cfg: QuantizerConfig,
    p: MosfetParams,
    vds_min: float,
    vds_max: float,
    vds_step: float,
    include_endpoint: bool = True,
) -> SampleBlock:
    """Same stream as encode_grid(make_eval_grid(...)), built column-wise."""
    vds = np.array(vds_sweep(vds_min, vds_max, vds_step, include_endpoint))
    levels = [quantize(v, cfg) for v in cfg.levels()]
    n = len(vds)
    return SampleBlock(
        ids=np.concatenate([curve_gain(p, v) * (1.0 + p.lam * vds) for v in levels]),
        segment=np.repeat(np.arange(len(levels), dtype=np.int64), n),
        vgs=np.repeat(np.array(levels), n),
        vds=np.tile(vds, len(levels)),
    )


def encode_grid(grid: list[list[SensorPair]], cfg: QuantizerConfig, p: MosfetParams) -> list[EncodedSample]:
    levels = {}
    out = []
    for i, curve in enumerate(grid):
        for pair in curve:
            if pair.y_raw not in levels:
                levels[pair.y_raw] = quantize(pair.y_raw, cfg)
            out.append(_encode_at(levels[pair.y_raw], pair.x_raw, p, i))
    return out
