"""Behavioral simulator for MOSFET-based analog joint source-channel coding.

Two sensor voltages are compressed into one drain current: one sensor is
quantized onto a discrete gate-voltage grid by the variable-step
precircuit, the other drives Vds directly.  The receiver recovers both
from consecutive currents by slope matching on the channel-length
modulation term.
"""

from .device import (
    PAPER_DEVICE,
    MosfetParams,
    approx_slope_from_currents,
    curve_slope_exact,
    ids_forward,
    invert_vds,
)
from .errors import AjsccError, ConfigError, DegeneratePairError, DeviceOffError, DomainError, InversionError
from .experiments import SweepSpec, rmse, sweep_lambda, sweep_phi
from .multimos import assign_levels, decode_bank
from .precircuit import QuantizerConfig, derive_phi_prime, encode_phi, power_estimate, quantize
from .receiver import DecodedPair, DecoderConfig, decode_pair, decode_stream
from .transmitter import EncodedSample, SensorPair, encode, make_eval_grid

__version__ = "0.1.0"
