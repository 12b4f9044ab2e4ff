"""Slope-matching decoder with range-check correction.

Two consecutive currents from one curve share a gate level.  For every
candidate level the receiver knows the exact curve slope
lambda * 1/2 * kprime * (c - vth)^2; it compares that with the estimate
lambda * mean(Ids) and ranks candidates by the absolute difference.  The
estimate carries a (1 + lambda * Vds) bias, so at high Vds the ranking can
prefer the next level up.  With correction on, candidates whose inverted
Vds values leave the transmitter's known Vds range are skipped in rank
order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernel
from .device import MosfetParams, approx_slope_from_currents, curve_gain, invert_vds
from .errors import ConfigError, DegeneratePairError
from .transmitter import EncodedSample

log = logging.getLogger(__name__)

# slack on the inclusive Vds range so grid endpoints survive float round-off
RANGE_TOL = 1e-9

SLIDING = "sliding"
DISJOINT = "disjoint"


@dataclass(frozen=True)
class DecoderConfig:
    candidate_levels: tuple[float, ...]
    device: MosfetParams
    vds_range: tuple[float, float] = (4.5, 10.0)
    # per-candidate device overrides (multi-MOSFET banks); None -> ``device``
    candidate_devices: tuple[MosfetParams, ...] | None = None

    def __post_init__(self):
        levels = tuple(float(c) for c in self.candidate_levels)
        object.__setattr__(self, "candidate_levels", levels)
        if not levels:
            raise ConfigError("no candidate levels")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ConfigError("candidate levels must be strictly increasing")
        if self.candidate_devices is not None and len(self.candidate_devices) != len(levels):
            raise ConfigError("need one device per candidate level")
        for c, d in zip(levels, self.devices()):
            if not c > d.vth:
                raise ConfigError(f"candidate {c} V is not above vth={d.vth} V")
            if not d.lam > 0:
                raise ConfigError("slope matching needs lambda > 0")
        lo, hi = self.vds_range
        if not hi > lo:
            raise ConfigError(f"empty Vds range {self.vds_range}")

    def devices(self) -> tuple[MosfetParams, ...]:
        return self.candidate_devices or (self.device,) * len(self.candidate_levels)

    def index_of(self, c: float) -> int:
        try:
            return self.candidate_levels.index(c)
        except ValueError:
            raise ConfigError(f"{c} V is not a candidate level") from None

    def gains(self) -> np.ndarray:
        return np.array([curve_gain(d, c) for c, d in zip(self.candidate_levels, self.devices())])

    def lams(self) -> np.ndarray:
        return np.array([d.lam for d in self.devices()])


@dataclass(frozen=True)
class DecodedPair:
    vgs_hat: float
    vds_hat_1: float
    vds_hat_2: float
    rank_used: int
    corrected: bool  # range check accepted an in-range candidate
    first: int = -1
    second: int = -1


@dataclass
class BatchDecode:
    """Array form of many decoded pairs; index arrays point into the sample stream."""

    first: np.ndarray
    second: np.ndarray
    choice: np.ndarray
    vgs_hat: np.ndarray
    vds_hat_1: np.ndarray
    vds_hat_2: np.ndarray
    rank: np.ndarray
    passed: np.ndarray

    def __len__(self):
        return len(self.first)

    def pairs(self) -> list[DecodedPair]:
        return [
            DecodedPair(float(g), float(a), float(b), int(r), bool(p), int(i), int(j))
            for g, a, b, r, p, i, j in zip(
                self.vgs_hat, self.vds_hat_1, self.vds_hat_2, self.rank, self.passed, self.first, self.second
            )
        ]


def slope_mismatch(cfg: DecoderConfig, candidate: float, ids1: float, ids2: float) -> float:
    """|two-point slope on ``candidate``'s curve - lambda * mean(Ids)|."""
    if ids1 == ids2:
        raise DegeneratePairError("equal currents give no slope")
    d = cfg.devices()[cfg.index_of(candidate)]
    two_point = (ids2 - ids1) / (invert_vds(d, candidate, ids2) - invert_vds(d, candidate, ids1))
    return abs(two_point - approx_slope_from_currents(d, ids1, ids2))


def rank_candidates(cfg: DecoderConfig, ids1: float, ids2: float) -> list[float]:
    """Candidate levels, best slope match first; equal mismatches favour the lower level."""
    if ids1 == ids2:
        raise DegeneratePairError("equal currents give no slope")
    mm = np.abs(cfg.lams() * cfg.gains() - cfg.lams() * (ids1 + ids2) / 2.0)
    return [cfg.candidate_levels[i] for i in np.argsort(mm, kind="stable")]


def decode_arrays(cfg: DecoderConfig, ids1, ids2, apply_correction: bool = True) -> BatchDecode:
    ids1 = np.asarray(ids1, dtype=np.float64)
    ids2 = np.asarray(ids2, dtype=np.float64)
    if np.any(ids1 == ids2):
        raise DegeneratePairError("equal currents give no slope")
    lo, hi = cfg.vds_range
    choice, rank, v1, v2, passed = kernel.decode_batch(
        cfg.gains(), cfg.lams(), ids1, ids2, lo, hi, RANGE_TOL, apply_correction
    )
    idx = np.arange(len(ids1))
    return BatchDecode(
        first=idx,
        second=idx,
        choice=choice,
        vgs_hat=np.asarray(cfg.candidate_levels)[choice],
        vds_hat_1=v1,
        vds_hat_2=v2,
        rank=rank,
        passed=passed.astype(bool),
    )


def decode_pair(cfg: DecoderConfig, ids1: float, ids2: float, apply_correction: bool = True) -> DecodedPair:
    return decode_arrays(cfg, [ids1], [ids2], apply_correction).pairs()[0]


def _segment_ids(samples) -> np.ndarray:
    seg = getattr(samples, "segment", None)
    if isinstance(seg, np.ndarray):
        return seg
    return np.array([s.segment for s in samples], dtype=np.int64)


def segments(samples) -> list[range]:
    """Index ranges of runs of consecutive samples sharing a segment id."""
    seg = _segment_ids(samples)
    cuts = [0, *(np.flatnonzero(np.diff(seg) != 0) + 1).tolist(), len(seg)]
    return [range(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]


def pair_indices(samples, pairing: str = SLIDING) -> tuple[np.ndarray, np.ndarray, int]:
    """Within-segment index pairs and the number of segments too short to pair.

    ``samples`` is a list of EncodedSample or a SampleBlock.
    """
    if pairing not in (SLIDING, DISJOINT):
        raise ConfigError(f"unknown pairing {pairing!r}")
    step = 1 if pairing == SLIDING else 2
    first, skipped = [], 0
    for seg in segments(samples):
        if len(seg) < 2:
            skipped += 1
            continue
        first.append(np.arange(seg.start, seg.stop - 1, step, dtype=np.int64))
    first = np.concatenate(first) if first else np.zeros(0, dtype=np.int64)
    return first, first + 1, skipped


def decode_indexed(
    cfg: DecoderConfig,
    ids: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
    apply_correction: bool = True,
) -> BatchDecode:
    out = decode_arrays(cfg, ids[first], ids[second], apply_correction)
    out.first, out.second = first, second
    return out


def decode_stream(
    cfg: DecoderConfig,
    samples: list[EncodedSample],
    pairing: str = SLIDING,
    apply_correction: bool = True,
) -> list[DecodedPair]:
    first, second, skipped = pair_indices(samples, pairing)
    if skipped:
        log.warning("skipped %d segment(s) with fewer than two samples", skipped)
    ids = np.array([s.ids for s in samples], dtype=np.float64)
    return decode_indexed(cfg, ids, first, second, apply_correction).pairs()
