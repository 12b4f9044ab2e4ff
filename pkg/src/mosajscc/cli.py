"""Command-line entry point.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or input.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import os
import sys
from dataclasses import asdict

from .device import PAPER_DEVICE, MosfetParams
from .errors import AjsccError
from .experiments import (
    SweepSpec,
    config_lines,
    default_lambda_grid,
    default_phi_grid,
    degradation_onset,
    sweep_lambda,
    sweep_phi,
    write_csv,
)
from .multimos import GENIE, UNION, assign_levels, bank_sweep
from .precircuit import QuantizerConfig, circuit_counts, quantize_trace
from .receiver import DISJOINT, SLIDING, DecoderConfig, decode_pair
from .transmitter import SensorPair, encode

log = logging.getLogger("mosajscc")

EXIT_IO = 1
EXIT_INVALID = 2


class IOFailure(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    """Comma list ``a, b, c`` or inclusive range ``start:stop:step``."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int((stop - start) / step + 1e-9) + 1
        return tuple(round(start + k * step, 10) for k in range(n))
    return tuple(float(x) for x in text.split(",") if x.strip())


def load_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as f:
                cp.read_file(f)
        except OSError as exc:
            raise IOFailure(f"cannot read config {path}: {exc}") from exc
    return cp


def device_from(cp: configparser.ConfigParser) -> MosfetParams:
    sec = cp["device"] if cp.has_section("device") else {}
    return MosfetParams(
        kprime=float(sec.get("kprime", PAPER_DEVICE.kprime)),
        vth=float(sec.get("vth", PAPER_DEVICE.vth)),
        lam=float(sec.get("lambda", PAPER_DEVICE.lam)),
        label=sec.get("label", PAPER_DEVICE.label),
    )


def spec_from(cp: configparser.ConfigParser) -> SweepSpec:
    sw = cp["sweep"] if cp.has_section("sweep") else {}
    q = cp["quantizer"] if cp.has_section("quantizer") else {}
    phis = _floats(sw["phi_values"]) if "phi_values" in sw else tuple(default_phi_grid())
    lams = _floats(sw["lambda_values"]) if "lambda_values" in sw else tuple(default_lambda_grid())
    spec = SweepSpec(
        device=device_from(cp),
        phi_values=phis,
        lambda_values=lams,
        vds_min=float(sw.get("vds_min", 4.5)),
        vds_max=float(sw.get("vds_max", 10.0)),
        vds_step=float(sw.get("vds_step", 0.1)),
        vgs_min=float(q.get("vgs_min", 1.0)),
        vgs_max=float(q.get("vgs_max", 5.0)),
        pairing=sw.get("pairing", SLIDING),
        noise_sigma=float(sw.get("noise_sigma", 0.0)),
        seed=int(sw.get("seed", 0)),
        include_endpoint=str(sw.get("include_endpoint", "true")).lower() in ("1", "true", "yes", "on"),
        workers=int(sw.get("workers", 1)),
    )
    if spec.pairing not in (SLIDING, DISJOINT):
        raise ValueError(f"pairing must be {SLIDING!r} or {DISJOINT!r}")
    return spec.validate()


def _check_out_dir(path: str):
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise IOFailure(f"output directory {d} does not exist")


def cmd_quantize(args) -> int:
    cfg = QuantizerConfig(args.phi, args.vgs_min, args.vgs_max)
    level, trace = quantize_trace(args.vin, cfg)
    print(f"{level:.9g}")
    if trace is not None:
        print(f"ilq {trace.ilq:.9g}")
        print("stage residual_in emitted kind")
        for s in trace.stages:
            print(f"{s.stage} {s.residual_in:.9g} {s.emitted:.9g} {s.kind}")
    return 0


def cmd_encode(args) -> int:
    cp = load_config(args.config)
    dev = device_from(cp)
    cfg = QuantizerConfig(args.phi, args.vgs_min, args.vgs_max)
    s = encode(SensorPair(args.vgs_in, args.vds), cfg, dev)
    print(f"vgs_level {s.truth.vgs_level:.9g}")
    print(f"ids {s.ids:.9g}")
    return 0


def cmd_decode(args) -> int:
    cp = load_config(args.config)
    dev = device_from(cp)
    levels = QuantizerConfig(args.phi, args.vgs_min, args.vgs_max).levels()
    dcfg = DecoderConfig(tuple(levels), dev, (args.vds_min, args.vds_max))
    d = decode_pair(dcfg, args.ids1, args.ids2, apply_correction=not args.no_correction)
    print(f"vgs_hat {d.vgs_hat:.9g}")
    print(f"vds_hat {d.vds_hat_1:.9g} {d.vds_hat_2:.9g}")
    print(f"rank_used {d.rank_used}")
    print(f"corrected {str(d.corrected).lower()}")
    return 0


def cmd_sweep(args) -> int:
    cp = load_config(args.config)
    spec = spec_from(cp)
    out = args.out or cp.get("output", "path", fallback=None)
    if not out:
        raise ValueError("no output path (--out or [output] path)")
    _check_out_dir(out)
    header = config_lines(spec, param=args.param)
    for line in header:
        print(f"# {line}", file=sys.stderr)
    results = sweep_phi(spec) if args.param == "phi" else sweep_lambda(spec)
    try:
        write_csv(out, results, header)
    except OSError as exc:
        raise IOFailure(f"cannot write {out}: {exc}") from exc
    onset = degradation_onset(results)
    print(
        f"cells {len(results)}; max rmse_vgs before {max(r.rmse_vgs_before for r in results):.4g} V, "
        f"after {max(r.rmse_vgs_after for r in results):.4g} V; "
        f"max rmse_vds before {max(r.rmse_vds_before for r in results):.4g} V, "
        f"after {max(r.rmse_vds_after for r in results):.4g} V; "
        f"degradation onset phi {'none' if onset is None else f'{onset:.4g} V'}"
    )
    return 0


def cmd_power(args) -> int:
    c = circuit_counts(QuantizerConfig(args.phi), args.shared)
    print(f"{c.power_uw:.7f} uW ({c.stages} stage(s), {c.opamps} OpAmp(s), {c.comparators} comparators)")
    return 0


def cmd_multimos_sweep(args) -> int:
    cp = load_config(args.config)
    spec = spec_from(cp)
    levels = QuantizerConfig(args.phi, spec.vgs_min, spec.vgs_max).levels()
    if args.levels is not None:
        levels = levels[: args.levels]
    bank = assign_levels(levels, args.devices, spec.device)
    modes = [GENIE, UNION] if args.mode == "both" else [args.mode]
    results = [bank_sweep(bank, m, spec.vds_min, spec.vds_max, spec.vds_step, spec.pairing) for m in modes]
    rows = [asdict(r) for r in results]
    if args.out:
        _check_out_dir(args.out)
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                for line in config_lines(spec, n_devices=args.devices, phi_global=args.phi, n_levels=len(levels)):
                    f.write(f"# {line}\n")
                w = csv.DictWriter(f, fieldnames=list(rows[0]), lineterminator="\n")
                w.writeheader()
                for r in rows:
                    w.writerow({k: f"{v:.9g}" if isinstance(v, float) else v for k, v in r.items()})
        except OSError as exc:
            raise IOFailure(f"cannot write {args.out}: {exc}") from exc
    for r in results:
        print(
            f"{r.mode}: {r.n_devices} devices, {r.n_levels} levels; misdecodes {r.misdecodes_before} -> "
            f"{r.misdecodes_after}; rmse_vgs {r.rmse_vgs_before:.4g} -> {r.rmse_vgs_after:.4g} V"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mosajscc", description="MOSFET-based analog JSCC simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def grid_args(sp):
        sp.add_argument("--vgs-min", type=float, default=1.0)
        sp.add_argument("--vgs-max", type=float, default=5.0)

    q = sub.add_parser("quantize", help="run the precircuit on one input voltage")
    q.add_argument("--vin", type=float, required=True)
    q.add_argument("--phi", type=float, required=True)
    grid_args(q)
    q.set_defaults(func=cmd_quantize)

    e = sub.add_parser("encode", help="encode one (Vgs,in, Vds) pair into a current")
    e.add_argument("--vgs-in", type=float, required=True)
    e.add_argument("--vds", type=float, required=True)
    e.add_argument("--phi", type=float, default=0.5)
    e.add_argument("--config")
    grid_args(e)
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="decode two consecutive currents")
    d.add_argument("--ids1", type=float, required=True)
    d.add_argument("--ids2", type=float, required=True)
    d.add_argument("--phi", type=float, default=0.5)
    d.add_argument("--vds-min", type=float, default=4.5)
    d.add_argument("--vds-max", type=float, default=10.0)
    d.add_argument("--no-correction", action="store_true")
    d.add_argument("--config")
    grid_args(d)
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("sweep", help="RMSE sweep over phi or lambda, written as CSV")
    s.add_argument("config", nargs="?")
    s.add_argument("--param", choices=["phi", "lambda"], default="phi")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    w = sub.add_parser("power", help="precircuit power estimate")
    w.add_argument("--phi", type=float, default=0.5)
    w.add_argument("--shared", action="store_true", help="one shared 1-stage precircuit (multi-MOSFET)")
    w.set_defaults(func=cmd_power)

    m = sub.add_parser("multimos-sweep", help="evaluate an interleaved multi-MOSFET bank")
    m.add_argument("config", nargs="?")
    m.add_argument("--devices", type=int, default=4)
    m.add_argument("--phi", type=float, default=0.2, help="global level spacing")
    m.add_argument("--levels", type=int, default=20, help="keep the lowest N levels of the grid")
    m.add_argument("--mode", choices=[GENIE, UNION, "both"], default="both")
    m.add_argument("--out")
    m.set_defaults(func=cmd_multimos_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AjsccError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
