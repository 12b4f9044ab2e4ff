"""Behavioral model of the variable-phi quantizing precircuit.

An integer-level quantizer (ILQ) floors the sensor voltage, then up to four
binary stages refine the fractional residual.  Stage n compares its input
residual against 0.5/2**(n-1) V; the last active stage emits its final
value 1/2**(n-1) V instead of the residual value, and every stage after it
is powered down.  The ILQ output plus all stage outputs is the gate voltage
applied to the MOSFET.

Quantization steps that the four-stage circuit cannot realize (sweeps use
e.g. phi = 0.15 V) go through a plain nearest-level quantizer with the
same ties-up rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError

HIGH = 5.0
LOW = 0.0
N_STAGES = 4
# one-hot line order (phi3, phi2, phi1, phi0)
SUPPORTED_PHI = (1.0, 0.5, 0.25, 0.125)

OPAMP_UW = 8.0
COMPARATOR_UW = 12.7e-3

_LEVEL_DIGITS = 12
_TIE_EPS = 1e-9


@dataclass(frozen=True)
class PhiCode:
    lines: tuple[float, float, float, float]

    def __post_init__(self):
        if sum(v == HIGH for v in self.lines) != 1 or any(v not in (HIGH, LOW) for v in self.lines):
            raise ConfigError(f"phi code must be one-hot, got {self.lines}")

    @property
    def phi(self) -> float:
        return SUPPORTED_PHI[self.lines.index(HIGH)]

    @property
    def last_stage(self) -> int:
        return self.lines.index(HIGH) + 1


@dataclass(frozen=True)
class PhiPrimeCode:
    lines: tuple[float, float, float, float]

    def __post_init__(self):
        high = [v == HIGH for v in self.lines]
        if not high[0] or any(b and not a for a, b in zip(high, high[1:])):
            raise ConfigError(f"phi' code must be a nonempty prefix pattern, got {self.lines}")

    def stage_powered(self, n: int) -> bool:
        return self.lines[n - 1] == HIGH


def is_circuit_phi(phi: float) -> bool:
    return phi in SUPPORTED_PHI


def encode_phi(phi: float) -> PhiCode:
    if not is_circuit_phi(phi):
        raise ConfigError(f"phi={phi} V is not realizable by the 4-stage precircuit {SUPPORTED_PHI}")
    i = SUPPORTED_PHI.index(phi)
    return PhiCode(tuple(HIGH if j == i else LOW for j in range(N_STAGES)))


def derive_phi_prime(code: PhiCode) -> PhiPrimeCode:
    """Prefix closure: the selected line and every higher-order line go HIGH."""
    last = code.lines.index(HIGH)
    return PhiPrimeCode(tuple(HIGH if j <= last else LOW for j in range(N_STAGES)))


@dataclass(frozen=True)
class QuantizerConfig:
    phi: float
    vgs_min: float = 1.0
    vgs_max: float = 5.0

    def __post_init__(self):
        if not self.vgs_max > self.vgs_min:
            raise ConfigError(f"empty Vgs range [{self.vgs_min}, {self.vgs_max}]")
        if not 0 < self.phi <= self.vgs_max - self.vgs_min:
            raise ConfigError(f"phi={self.phi} V must lie in (0, {self.vgs_max - self.vgs_min}]")

    @property
    def level_count(self) -> int:
        return int(math.floor((self.vgs_max - self.vgs_min) / self.phi + _TIE_EPS)) + 1

    def levels(self) -> list[float]:
        return [self.level(k) for k in range(self.level_count)]

    def level(self, k: int) -> float:
        return round(self.vgs_min + k * self.phi, _LEVEL_DIGITS)

    @property
    def uses_circuit(self) -> bool:
        """True when the staged precircuit realizes this configuration."""
        return is_circuit_phi(self.phi) and float(self.vgs_min).is_integer()


@dataclass(frozen=True)
class StageRecord:
    stage: int
    residual_in: float
    emitted: float
    kind: str  # "residual", "final" or "powered-down"


@dataclass
class StageTrace:
    ilq: float
    stages: list[StageRecord] = field(default_factory=list)

    @property
    def total(self) -> float:
        return self.ilq + sum(s.emitted for s in self.stages)


def _check_range(vin: float, vgs_min: float, vgs_max: float):
    if not vgs_min <= vin <= vgs_max:
        raise DomainError(f"input {vin} V out of range [{vgs_min}, {vgs_max}] V")


def ilq(vin: float, vgs_min: float = 1.0, vgs_max: float = 5.0) -> float:
    _check_range(vin, vgs_min, vgs_max)
    return float(math.floor(vin))


def stage_threshold(n: int) -> float:
    return 0.5 / 2 ** (n - 1)


def run_stage(n: int, residual_in: float, is_last: bool) -> tuple[float, float]:
    """One refinement stage; returns (emitted voltage, residual for the next stage)."""
    if not 1 <= n <= N_STAGES:
        raise ConfigError(f"stage index {n} outside 1..{N_STAGES}")
    t = stage_threshold(n)
    if not 0.0 <= residual_in < 2 * t:
        raise DomainError(f"stage {n} residual {residual_in} V outside [0, {2 * t})")
    if residual_in < t:
        return 0.0, residual_in
    if is_last:
        return 2 * t, residual_in - t
    return t, residual_in - t


def quantize_trace(vin: float, cfg: QuantizerConfig) -> tuple[float, StageTrace | None]:
    """Quantized gate voltage and, for circuit-realizable phi, the stage trace."""
    _check_range(vin, cfg.vgs_min, cfg.vgs_max)
    if not cfg.uses_circuit:
        return _nearest_level(vin, cfg), None

    prime = derive_phi_prime(encode_phi(cfg.phi))
    trace = StageTrace(ilq=ilq(vin, cfg.vgs_min, cfg.vgs_max))
    residual = vin - trace.ilq
    for n in range(1, N_STAGES + 1):
        if not prime.stage_powered(n):
            trace.stages.append(StageRecord(n, residual, 0.0, "powered-down"))
            continue
        last = n == N_STAGES or not prime.stage_powered(n + 1)
        emitted, nxt = run_stage(n, residual, last)
        trace.stages.append(StageRecord(n, residual, emitted, "final" if last else "residual"))
        residual = nxt
    top = cfg.level(cfg.level_count - 1)
    return min(round(trace.total, _LEVEL_DIGITS), top), trace


def quantize(vin: float, cfg: QuantizerConfig) -> float:
    return quantize_trace(vin, cfg)[0]


def _nearest_level(vin: float, cfg: QuantizerConfig) -> float:
    k = math.floor((vin - cfg.vgs_min) / cfg.phi + 0.5 + _TIE_EPS)
    return cfg.level(min(k, cfg.level_count - 1))


@dataclass(frozen=True)
class CircuitCounts:
    stages: int
    opamps: int
    comparators: int

    @property
    def power_uw(self) -> float:
        return self.opamps * OPAMP_UW + self.comparators * COMPARATOR_UW


def circuit_counts(cfg: QuantizerConfig, shared_single_stage: bool = False) -> CircuitCounts:
    """Active stages and component counts for the power model.

    The ILQ needs one comparator per reference integer in [vgs_min, vgs_max),
    each active stage one comparator and one OpAmp, plus one adder OpAmp.
    In the shared multi-MOSFET mode a single one-stage precircuit serves
    every device and the whole chain costs one OpAmp.
    """
    code = encode_phi(cfg.phi)
    n_refs = len(range(math.ceil(cfg.vgs_min), math.ceil(cfg.vgs_max)))
    if shared_single_stage:
        return CircuitCounts(stages=1, opamps=1, comparators=n_refs + 1)
    s = code.last_stage
    return CircuitCounts(stages=s, opamps=s + 1, comparators=n_refs + s)


def power_estimate(cfg: QuantizerConfig, shared_single_stage: bool = False) -> float:
    """Estimated precircuit power in microwatts."""
    return circuit_counts(cfg, shared_single_stage).power_uw
