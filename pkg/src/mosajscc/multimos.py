"""Interleaved multi-MOSFET banks.

A fine global level grid is dealt round-robin over several devices so each
device carries only a few widely spaced curves.  Only the device that owns
the current level is on.  How the receiver learns which device transmitted
is left open, so two decoders are provided:

* ``genie``: the receiver knows the transmitting device and matches only
  against that device's levels.
* ``union``: the receiver matches against every level of every device.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import PAPER_DEVICE, MosfetParams, ids_forward
from .errors import ConfigError
from .experiments import misdecodes, rmse
from .receiver import SLIDING, BatchDecode, DecodedPair, DecoderConfig, decode_indexed, pair_indices
from .transmitter import EncodedSample, Truth, vds_sweep

GENIE = "genie"
UNION = "union"


@dataclass(frozen=True)
class MosfetBank:
    devices: tuple[MosfetParams, ...]
    assignment: tuple[int, ...]  # level index -> device index
    levels: tuple[float, ...]

    def __post_init__(self):
        if len(self.assignment) != len(self.levels):
            raise ConfigError("assignment must cover every level")
        if any(not 0 <= d < len(self.devices) for d in self.assignment):
            raise ConfigError("assignment refers to a missing device")

    @property
    def n_devices(self) -> int:
        return len(self.devices)

    def device_levels(self, d: int) -> list[float]:
        return [v for v, a in zip(self.levels, self.assignment) if a == d]

    def device_of(self, level: float) -> int:
        try:
            return self.assignment[self.levels.index(level)]
        except ValueError:
            raise ConfigError(f"{level} V is not a bank level") from None


def assign_levels(
    levels,
    n_devices: int,
    device: MosfetParams = PAPER_DEVICE,
    overrides: dict[int, MosfetParams] | None = None,
) -> MosfetBank:
    """Deal level i to device i mod n_devices."""
    levels = tuple(float(v) for v in levels)
    if n_devices < 1:
        raise ConfigError("need at least one device")
    if n_devices > len(levels):
        raise ConfigError(f"{n_devices} devices for only {len(levels)} levels")
    overrides = overrides or {}
    devices = tuple(overrides.get(d, device) for d in range(n_devices))
    return MosfetBank(devices, tuple(i % n_devices for i in range(len(levels))), levels)


def encode_bank_grid(bank: MosfetBank, vds_min: float, vds_max: float, vds_step: float,
                     include_endpoint: bool = True) -> list[EncodedSample]:
    """Every bank level swept over Vds on its own device; one segment per level."""
    vds = vds_sweep(vds_min, vds_max, vds_step, include_endpoint)
    out = []
    for i, (v, d) in enumerate(zip(bank.levels, bank.assignment)):
        dev = bank.devices[d]
        out.extend(EncodedSample(ids_forward(dev, v, x), i, Truth(v, x)) for x in vds)
    return out


def _decode_batch(bank, samples, mode, apply_correction, vds_range, pairing) -> BatchDecode:
    first, second, _ = pair_indices(samples, pairing)
    ids = np.array([s.ids for s in samples], dtype=np.float64)
    if mode == UNION:
        cfg = DecoderConfig(
            bank.levels, bank.devices[0], vds_range,
            candidate_devices=tuple(bank.devices[d] for d in bank.assignment),
        )
        return decode_indexed(cfg, ids, first, second, apply_correction)
    if mode != GENIE:
        raise ConfigError(f"unknown bank decode mode {mode!r}")
    if any(s.truth is None for s in samples):
        raise ConfigError("genie decoding needs the transmitting device from sample truth")

    owner = np.array([bank.device_of(samples[i].truth.vgs_level) for i in first], dtype=np.int64)
    n = len(first)
    out = BatchDecode(
        first=first, second=second,
        choice=np.zeros(n, dtype=np.int64), vgs_hat=np.zeros(n),
        vds_hat_1=np.zeros(n), vds_hat_2=np.zeros(n),
        rank=np.zeros(n, dtype=np.int64), passed=np.zeros(n, dtype=bool),
    )
    for d in range(bank.n_devices):
        sel = np.flatnonzero(owner == d)
        if not len(sel):
            continue
        cfg = DecoderConfig(tuple(bank.device_levels(d)), bank.devices[d], vds_range)
        part = decode_indexed(cfg, ids, first[sel], second[sel], apply_correction)
        out.vgs_hat[sel] = part.vgs_hat
        out.vds_hat_1[sel] = part.vds_hat_1
        out.vds_hat_2[sel] = part.vds_hat_2
        out.rank[sel] = part.rank
        out.passed[sel] = part.passed
        out.choice[sel] = [bank.levels.index(v) for v in part.vgs_hat]
    return out


def decode_bank(
    bank: MosfetBank,
    samples: list[EncodedSample],
    mode: str = GENIE,
    apply_correction: bool = True,
    vds_range: tuple[float, float] = (4.5, 10.0),
    pairing: str = SLIDING,
) -> list[DecodedPair]:
    return _decode_batch(bank, samples, mode, apply_correction, vds_range, pairing).pairs()


@dataclass(frozen=True)
class BankResult:
    mode: str
    n_devices: int
    n_levels: int
    rmse_vgs_before: float
    rmse_vgs_after: float
    rmse_vds_before: float
    rmse_vds_after: float
    misdecodes_before: int
    misdecodes_after: int
    pairs: int


def bank_sweep(bank: MosfetBank, mode: str = GENIE, vds_min: float = 4.5, vds_max: float = 10.0,
               vds_step: float = 0.1, pairing: str = SLIDING) -> BankResult:
    samples = encode_bank_grid(bank, vds_min, vds_max, vds_step)
    rng = (vds_min, vds_max)
    before = _decode_batch(bank, samples, mode, False, rng, pairing)
    after = _decode_batch(bank, samples, mode, True, rng, pairing)
    gb, db = rmse(before, samples)
    ga, da = rmse(after, samples)
    return BankResult(mode, bank.n_devices, len(bank.levels), gb, ga, db, da,
                      misdecodes(before, samples), misdecodes(after, samples), len(before))
