"""Encode -> decode -> RMSE sweeps over the quantization step and CLM parameter."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .device import PAPER_DEVICE, MosfetParams
from .errors import ConfigError
from .precircuit import QuantizerConfig
from .receiver import SLIDING, BatchDecode, DecodedPair, DecoderConfig, decode_indexed, pair_indices
from .transmitter import SampleBlock, encode_block

MISDECODE_TOL = 1e-9

CSV_FIELDS = [
    "phi_V",
    "lambda_perV",
    "rmse_vgs_before_V",
    "rmse_vgs_after_V",
    "rmse_vds_before_V",
    "rmse_vds_after_V",
    "misdecodes_before",
    "misdecodes_after",
    "pairs",
]


def default_phi_grid() -> list[float]:
    return [round(0.1 + 0.05 * k, 10) for k in range(19)]


def default_lambda_grid() -> list[float]:
    return [float(x) for x in np.geomspace(0.001, 0.2, 25)]


@dataclass(frozen=True)
class SweepSpec:
    device: MosfetParams = PAPER_DEVICE
    phi_values: tuple[float, ...] = field(default_factory=lambda: tuple(default_phi_grid()))
    lambda_values: tuple[float, ...] = field(default_factory=lambda: tuple(default_lambda_grid()))
    vds_min: float = 4.5
    vds_max: float = 10.0
    vds_step: float = 0.1
    vgs_min: float = 1.0
    vgs_max: float = 5.0
    pairing: str = SLIDING
    noise_sigma: float = 0.0
    seed: int = 0
    include_endpoint: bool = True
    workers: int = 1

    def validate(self):
        if not self.phi_values:
            raise ConfigError("phi_values is empty")
        if not self.lambda_values:
            raise ConfigError("lambda_values is empty")
        if any(not lam > 0 for lam in self.lambda_values):
            raise ConfigError("lambda values must be > 0 for slope matching")
        if not self.noise_sigma >= 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not self.vgs_min > self.device.vth:
            raise ConfigError(f"vgs_min={self.vgs_min} V must exceed vth={self.device.vth} V")
        if not self.vds_min > self.vgs_max - self.device.vth:
            raise ConfigError(
                f"vds_min={self.vds_min} V leaves the top curve outside saturation "
                f"(needs > {self.vgs_max - self.device.vth:.3f} V)"
            )
        for phi in self.phi_values:
            QuantizerConfig(phi, self.vgs_min, self.vgs_max)
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self


@dataclass(frozen=True)
class CellResult:
    phi: float
    lam: float
    rmse_vgs_before: float
    rmse_vgs_after: float
    rmse_vds_before: float
    rmse_vds_after: float
    misdecodes_before: int
    misdecodes_after: int
    pairs: int

    def row(self) -> list[str]:
        vals = [
            self.phi,
            self.lam,
            self.rmse_vgs_before,
            self.rmse_vgs_after,
            self.rmse_vds_before,
            self.rmse_vds_after,
        ]
        return [f"{v:.9g}" for v in vals] + [str(self.misdecodes_before), str(self.misdecodes_after), str(self.pairs)]


def perturb(samples, sigma: float, seed: int | list[int] = 0):
    """Add zero-mean Gaussian noise of std ``sigma`` [A] to every current.

    Accepts a list of EncodedSample or a SampleBlock and returns the same kind.
    """
    if sigma < 0:
        raise ConfigError(f"sigma must be >= 0, got {sigma}")
    if isinstance(samples, SampleBlock):
        if sigma == 0:
            return samples
        noise = np.random.default_rng(seed).normal(0.0, sigma, size=len(samples))
        return replace(samples, ids=samples.ids + noise)
    if sigma == 0:
        return list(samples)
    noise = np.random.default_rng(seed).normal(0.0, sigma, size=len(samples))
    return [replace(s, ids=s.ids + float(n)) for s, n in zip(samples, noise)]


def _truth_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(samples, SampleBlock):
        samples = SampleBlock.from_samples(samples)
    return samples.vgs, samples.vds


def _as_batch(decoded) -> BatchDecode:
    if isinstance(decoded, BatchDecode):
        return decoded
    d: list[DecodedPair] = list(decoded)
    return BatchDecode(
        first=np.array([p.first for p in d], dtype=np.int64),
        second=np.array([p.second for p in d], dtype=np.int64),
        choice=np.zeros(len(d), dtype=np.int64),
        vgs_hat=np.array([p.vgs_hat for p in d]),
        vds_hat_1=np.array([p.vds_hat_1 for p in d]),
        vds_hat_2=np.array([p.vds_hat_2 for p in d]),
        rank=np.array([p.rank_used for p in d], dtype=np.int64),
        passed=np.array([p.corrected for p in d], dtype=bool),
    )


def scored_errors(decoded, samples) -> tuple[np.ndarray, np.ndarray]:
    """Per-point Vgs and Vds errors, each sample scored once.

    Every pair scores its second sample with (vgs_hat, vds_hat_2); a pair's
    first sample is scored with (vgs_hat, vds_hat_1) only when no other
    pair covers it as a second sample (start of a sliding segment, every
    disjoint pair).
    """
    b = _as_batch(decoded)
    vgs_true, vds_true = _truth_arrays(samples)
    extra = ~np.isin(b.first, b.second)
    idx = np.concatenate([b.second, b.first[extra]])
    vgs_hat = np.concatenate([b.vgs_hat, b.vgs_hat[extra]])
    vds_hat = np.concatenate([b.vds_hat_2, b.vds_hat_1[extra]])
    return vgs_hat - vgs_true[idx], vds_hat - vds_true[idx]


def rmse(decoded, samples) -> tuple[float, float]:
    eg, ed = scored_errors(decoded, samples)
    if len(eg) == 0:
        raise ConfigError("nothing to score")
    return math.sqrt(float(np.mean(eg**2))), math.sqrt(float(np.mean(ed**2)))


def misdecodes(decoded, samples) -> int:
    b = _as_batch(decoded)
    vgs_true, _ = _truth_arrays(samples)
    return int(np.count_nonzero(np.abs(b.vgs_hat - vgs_true[b.first]) > MISDECODE_TOL))


def _cell_seed(spec: SweepSpec, phi: float, lam: float) -> list[int]:
    # order-independent: derived from the cell coordinates, not its position
    return [spec.seed, round(phi * 1e9), round(lam * 1e12)]


def run_cell(spec: SweepSpec, phi: float, lam: float) -> CellResult:
    dev = spec.device.with_lambda(lam)
    qcfg = QuantizerConfig(phi, spec.vgs_min, spec.vgs_max)
    block = encode_block(qcfg, dev, spec.vds_min, spec.vds_max, spec.vds_step, spec.include_endpoint)
    samples = perturb(block, spec.noise_sigma, _cell_seed(spec, phi, lam))
    dcfg = DecoderConfig(tuple(qcfg.levels()), dev, (spec.vds_min, spec.vds_max))

    first, second, _ = pair_indices(samples, spec.pairing)
    before = decode_indexed(dcfg, samples.ids, first, second, apply_correction=False)
    after = decode_indexed(dcfg, samples.ids, first, second, apply_correction=True)
    gb, db = rmse(before, samples)
    ga, da = rmse(after, samples)
    return CellResult(
        phi, lam, gb, ga, db, da, misdecodes(before, samples), misdecodes(after, samples), len(first)
    )


def _run_cells(spec: SweepSpec, cells: list[tuple[float, float]]) -> list[CellResult]:
    cells = sorted(cells)
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as ex:
            return list(ex.map(run_cell, [spec] * len(cells), *zip(*cells)))
    return [run_cell(spec, phi, lam) for phi, lam in cells]


def sweep_phi(spec: SweepSpec) -> list[CellResult]:
    """RMSE before/after correction for each phi at the device's own lambda."""
    spec.validate()
    if not spec.device.lam > 0:
        raise ConfigError("device lambda must be > 0")
    return _run_cells(spec, [(phi, spec.device.lam) for phi in spec.phi_values])


def sweep_lambda(spec: SweepSpec) -> list[CellResult]:
    spec.validate()
    return _run_cells(spec, [(phi, lam) for phi in spec.phi_values for lam in spec.lambda_values])


def config_lines(spec: SweepSpec, **extra) -> list[str]:
    d = asdict(spec)
    dev = d.pop("device")
    lines = [f"device.{k} = {v!r}" for k, v in dev.items()]
    lines += [f"{k} = {v!r}" for k, v in d.items()]
    lines += [f"{k} = {v!r}" for k, v in extra.items()]
    return lines


def results_csv(results: list[CellResult], header: list[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(path, results: list[CellResult], header: list[str] = ()):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(results_csv(results, header))


def degradation_onset(results: list[CellResult], tol: float = 1e-6) -> float | None:
    """Largest phi whose after-correction Vgs RMSE exceeds ``tol``."""
    bad = [r.phi for r in results if r.rmse_vgs_after > tol]
    return max(bad) if bad else None
