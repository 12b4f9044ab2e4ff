import math

import numpy as np
import pytest

from mosajscc.device import ids_forward
from mosajscc.errors import ConfigError
from mosajscc.experiments import (
    CSV_FIELDS,
    SweepSpec,
    default_lambda_grid,
    default_phi_grid,
    misdecodes,
    perturb,
    results_csv,
    rmse,
    run_cell,
    scored_errors,
    sweep_lambda,
    sweep_phi,
)
from mosajscc.precircuit import QuantizerConfig
from mosajscc.receiver import DecodedPair, DecoderConfig, decode_stream
from mosajscc.transmitter import EncodedSample, Truth, encode_grid, make_eval_grid


def _stream(dev, phi=1.0, step=0.1):
    qcfg = QuantizerConfig(phi)
    samples = encode_grid(make_eval_grid(qcfg, 4.5, 10.0, step), qcfg, dev)
    return samples, DecoderConfig(tuple(qcfg.levels()), dev)


def test_default_grids():
    phis = default_phi_grid()
    assert phis[0] == 0.1 and phis[-1] == 1.0 and len(phis) == 19
    lams = default_lambda_grid()
    assert len(lams) == 25
    assert lams[0] == pytest.approx(0.001) and lams[-1] == pytest.approx(0.2)


def test_rmse_all_correct(dev):
    samples, cfg = _stream(dev)
    g, d = rmse(decode_stream(cfg, samples), samples)
    assert g == 0.0 and d <= 1e-9


def test_every_point_scored_once(dev):
    samples, cfg = _stream(dev)
    for pairing in ("sliding", "disjoint"):
        eg, _ = scored_errors(decode_stream(cfg, samples, pairing), samples)
        assert len(eg) == len(samples)


def test_rmse_single_error():
    truth = [Truth(2.0, 5.0 + 0.1 * k) for k in range(4)]
    samples = [EncodedSample(1.0 + k, 0, t) for k, t in enumerate(truth)]
    pairs = [DecodedPair(2.0, 5.0, 5.1, 0, True, 0, 1), DecodedPair(2.0, 5.1, 5.2, 0, True, 1, 2),
             DecodedPair(2.5, 5.2, 5.3, 0, True, 2, 3)]
    g, d = rmse(pairs, samples)
    assert g == pytest.approx(0.5 / math.sqrt(4))
    assert d == pytest.approx(0.0, abs=1e-12)
    assert misdecodes(pairs, samples) == 1


def test_rmse_empty():
    with pytest.raises(ConfigError):
        rmse([], [])


def test_before_correction_has_errors_at_half_volt(dev):
    r = run_cell(SweepSpec(), 0.5, dev.lam)
    assert r.rmse_vgs_before > 0
    assert r.misdecodes_before > 0 and r.misdecodes_after == 0


def test_perturb_identity_and_seed(dev):
    samples, _ = _stream(dev)
    assert perturb(samples, 0.0, 1) == samples
    a = perturb(samples, 1e-6, 7)
    assert a == perturb(samples, 1e-6, 7)
    assert a != perturb(samples, 1e-6, 8)
    with pytest.raises(ConfigError):
        perturb(samples, -1.0)


def test_noise_does_not_help(dev):
    samples, cfg = _stream(dev)
    clean = rmse(decode_stream(cfg, samples), samples)[0]
    noisy = [rmse(decode_stream(cfg, perturb(samples, 1e-6, s)), samples)[0] for s in range(20)]
    assert all(n >= clean for n in noisy)
    assert np.mean(noisy) > clean


def test_validation():
    with pytest.raises(ConfigError):
        SweepSpec(vds_min=3.0).validate()  # top curve would leave saturation
    with pytest.raises(ConfigError):
        SweepSpec(noise_sigma=-1).validate()
    with pytest.raises(ConfigError):
        SweepSpec(phi_values=()).validate()
    with pytest.raises(ConfigError):
        SweepSpec(lambda_values=(0.0,)).validate()


def test_csv_schema_and_format():
    rs = sweep_phi(SweepSpec(phi_values=(0.5, 1.0)))
    text = results_csv(rs, ["a = 1"])
    lines = text.splitlines()
    assert lines[0] == "# a = 1"
    assert lines[1] == ",".join(CSV_FIELDS)
    assert len(lines) == 4
    assert lines[2].startswith("0.5,0.037,")
    assert text.endswith("\n") and "\r" not in text


def test_csv_deterministic():
    spec = SweepSpec(phi_values=(0.2, 0.5), lambda_values=(0.01, 0.1), noise_sigma=2e-7, seed=5)
    assert results_csv(sweep_lambda(spec)) == results_csv(sweep_lambda(spec))


def test_parallel_matches_serial():
    spec = SweepSpec(phi_values=(1.0, 0.2, 0.5), lambda_values=(0.1, 0.01), noise_sigma=1e-7, seed=2)
    serial = sweep_lambda(spec)
    from dataclasses import replace

    assert sweep_lambda(replace(spec, workers=2)) == serial
    assert [(r.phi, r.lam) for r in serial] == sorted((r.phi, r.lam) for r in serial)


def test_after_never_worse_every_cell():
    for r in sweep_lambda(SweepSpec()):
        assert r.misdecodes_after <= r.misdecodes_before, (r.phi, r.lam)


def test_rmse_nondecreasing_in_lambda():
    rs = sweep_lambda(SweepSpec())
    by_phi = {}
    for r in rs:
        by_phi.setdefault(r.phi, []).append(r)
    for cells in by_phi.values():
        vals = [c.rmse_vgs_after for c in sorted(cells, key=lambda c: c.lam)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_lambda_001_phi_1_exact():
    r = run_cell(SweepSpec(), 1.0, 0.001)
    assert r.rmse_vgs_after <= 1e-9 and r.rmse_vgs_before <= 1e-9


def test_disjoint_pairing_runs():
    r = run_cell(SweepSpec(pairing="disjoint"), 0.5, 0.037)
    assert r.pairs == 9 * 28
    assert r.misdecodes_after == 0


def test_known_current_example(dev):
    s = EncodedSample(ids_forward(dev, 2.0, 5.0), 0, Truth(2.0, 5.0))
    assert s.ids == pytest.approx(1.45801215e-4, rel=1e-12)
