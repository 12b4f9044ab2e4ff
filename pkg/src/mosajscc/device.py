"""Square-law MOSFET model in saturation with channel-length modulation.

    Ids = 1/2 * kprime * (Vgs - Vth)^2 * (1 + lambda * Vds)

``kprime`` is the combined W/L * mu * Cox factor. Saturation validity
(Vds > Vgs - Vth) is left to the caller; the sweep harness checks it on
its grids.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, DeviceOffError, InversionError


@dataclass(frozen=True)
class MosfetParams:
    kprime: float
    vth: float
    lam: float
    label: str = ""

    def __post_init__(self):
        if not self.kprime > 0:
            raise ConfigError(f"kprime must be > 0, got {self.kprime}")
        if not self.vth > 0:
            raise ConfigError(f"vth must be > 0, got {self.vth}")
        if not self.lam >= 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")

    def with_lambda(self, lam: float) -> "MosfetParams":
        return MosfetParams(self.kprime, self.vth, lam, self.label)


# 0.18 um nMOS used for the encoding/decoding evaluation
PAPER_DEVICE = MosfetParams(kprime=155e-6, vth=0.74, lam=0.037, label="nmos-180nm")


@dataclass(frozen=True)
class OperatingPoint:
    vgs: float
    vds: float
    ids: float


def _overdrive(p: MosfetParams, vgs: float) -> float:
    if not vgs > p.vth:
        raise DeviceOffError(f"vgs={vgs} V does not exceed vth={p.vth} V (device off)")
    return vgs - p.vth


def curve_gain(p: MosfetParams, vgs: float) -> float:
    """Current at Vds = 0 for this gate voltage, 1/2 * kprime * (vgs - vth)^2."""
    d = _overdrive(p, vgs)
    return 0.5 * p.kprime * (d * d)


def ids_forward(p: MosfetParams, vgs: float, vds: float) -> float:
    return curve_gain(p, vgs) * (1.0 + p.lam * vds)


def operating_point(p: MosfetParams, vgs: float, vds: float) -> OperatingPoint:
    return OperatingPoint(vgs, vds, ids_forward(p, vgs, vds))


def invert_vds(p: MosfetParams, vgs: float, ids: float) -> float:
    """Drain-source voltage that produces ``ids`` on the ``vgs`` curve.

    The result may be negative or otherwise outside any physical range;
    the range-check decoder relies on seeing those values.
    """
    g = curve_gain(p, vgs)
    if p.lam == 0:
        raise InversionError("lambda = 0: Ids does not depend on Vds")
    return (ids / g - 1.0) / p.lam


def curve_slope_exact(p: MosfetParams, vgs: float) -> float:
    """dIds/dVds on the ``vgs`` curve; independent of Vds."""
    return p.lam * curve_gain(p, vgs)


def approx_slope_from_currents(p: MosfetParams, ids_a: float, ids_b: float) -> float:
    """Receiver-side slope estimate lambda * mean(Ids) from two samples."""
    return p.lam * (ids_a + ids_b) / 2.0
