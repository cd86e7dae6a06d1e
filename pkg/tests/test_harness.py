"""Verification harnesses: config validation, row shapes, CSV rendering."""

import math

import numpy as np
import pytest

from durp.data import eigen_spectrum, serialize_libsvm, spectrum_csv
from durp.gram import kappa
from durp.harness import (
    HarnessConfig,
    emit_spectrum,
    kappa_power_check,
    smooth_recovery_m,
    theorem1_csv,
    theorem2_csv,
    verify_theorem1,
    verify_theorem2,
)
from durp.synth import gaussian_blobs
from durp.triplets import build_cache, sample_active_triplets


def test_smooth_recovery_m_frozen_and_monotone():
    # independent arithmetic for the sampling-condition inversion at eps = 1/2
    assert smooth_recovery_m(200, 0.1) == math.ceil(32.0 * math.log(8 * 200 / 0.1))
    assert smooth_recovery_m(200, 0.1) == 310
    assert smooth_recovery_m(400, 0.1) > smooth_recovery_m(200, 0.1)
    assert smooth_recovery_m(200, 0.01) > smooth_recovery_m(200, 0.1)
    assert smooth_recovery_m(200, 0.1, epsilon=0.25) > smooth_recovery_m(200, 0.1)


def test_harness_config_validation():
    with pytest.raises(ValueError, match="1 <= r <= d"):
        HarnessConfig(d=5, r=6)
    with pytest.raises(ValueError, match="lie in"):
        HarnessConfig(d=10, r=2, m_sweep=(0, 5))
    with pytest.raises(ValueError, match="lie in"):
        HarnessConfig(d=10, r=2, m_sweep=(5, 11))
    with pytest.raises(ValueError, match="delta"):
        HarnessConfig(delta=1.0)
    with pytest.raises(ValueError, match="positive"):
        HarnessConfig(eta=0.0)
    with pytest.raises(ValueError, match="seed"):
        HarnessConfig(seeds=())


def tiny_t1_config():
    return HarnessConfig(d=20, r=2, n=40, n_triplets=30, m_sweep=(2, 4, 20), seeds=(0, 1))


def test_verify_theorem1_rows_and_errors():
    result = verify_theorem1(tiny_t1_config())
    assert set(result) == {"rows", "errors", "oracle_gap"}
    assert result["oracle_gap"] >= 0.0
    assert [row["m"] for row in result["rows"]] == [2, 4, 20]
    for row in result["rows"]:
        errs = result["errors"][row["m"]]
        assert errs.shape == (2,)
        assert (errs >= 0.0).all()
        assert row["e_median"] == float(np.median(errs))
        assert row["e_q25"] <= row["e_median"] <= row["e_q75"]
        # sampling-condition reference curve, c = 1/3
        eps = math.sqrt(3.0 * 3 * math.log(2.0 * 2 / 0.1) / row["m"])
        assert row["eps_ref"] == pytest.approx(eps, rel=1e-12)


def test_theorem1_csv_round_trips_rows():
    result = verify_theorem1(tiny_t1_config())
    lines = theorem1_csv(result).splitlines()
    data_lines = [l for l in lines if not l.startswith("#")]
    assert data_lines[0] == "m,e_median,e_q25,e_q75,eps_ref,bound_ref"
    assert len(data_lines) == 1 + 3
    for text, row in zip(data_lines[1:], result["rows"]):
        fields = text.split(",")
        assert int(fields[0]) == row["m"]
        assert float(fields[1]) == row["e_median"]  # %.17g round-trips exactly
        assert float(fields[4]) == row["eps_ref"]


def tiny_t2_config():
    return HarnessConfig(d=80, r=1, n=40, n_triplets=30, m_sweep=(1,), seeds=(0, 1))


def test_verify_theorem2_rows():
    config = tiny_t2_config()
    result = verify_theorem2(config, m=64)
    assert result["m"] == 64
    assert len(result["rows"]) == 2
    eps = math.sqrt(8.0 * math.log(8.0 * 30 / 0.1) / 64)
    for row, seed in zip(result["rows"], (0, 1)):
        assert row["seed"] == seed
        assert row["m"] == 64
        assert row["epsilon"] == pytest.approx(eps, rel=1e-12)
        assert row["kappa"] == result["kappa_stats"].kappa
        assert row["eps_term"] == pytest.approx(
            8.0 * row["epsilon"] * row["kappa"] * row["alpha_norm"], rel=1e-12
        )
        assert row["eta_term"] == pytest.approx(math.sqrt(2.0 * 1e-6), rel=1e-12)
        assert row["bound"] == max(row["eps_term"], row["eta_term"])
        assert row["satisfied"] == (row["measured"] <= row["bound"])
        assert row["measured"] >= 0.0


def test_verify_theorem2_auto_m_respects_dimension():
    # auto m for N=30 exceeds d=80, so the sampling condition is unmeetable
    with pytest.raises(ValueError, match="sampling condition"):
        verify_theorem2(tiny_t2_config())


def test_theorem2_csv_shape():
    result = verify_theorem2(tiny_t2_config(), m=64)
    lines = theorem2_csv(result).splitlines()
    data_lines = [l for l in lines if not l.startswith("#")]
    assert data_lines[0].split(",")[:4] == ["m", "seed", "epsilon", "kappa"]
    assert len(data_lines) == 1 + 2
    assert data_lines[1].split(",")[-1] in ("0", "1")


def test_kappa_power_check_matches_closed_form():
    data = gaussian_blobs(10, 40, 3, seed=2)
    cache = build_cache(data, sample_active_triplets(data, 25, seed=2))
    closed = kappa(cache).norms
    powered = kappa_power_check(cache)
    assert len(powered) == 4
    for a, b in zip(closed, powered):
        assert abs(a - b) <= 1e-8 * max(abs(a), 1.0)


def test_emit_spectrum_matches_direct_call(tmp_path):
    data = gaussian_blobs(7, 25, 2, seed=5)
    path = tmp_path / "data.svm"
    path.write_text(serialize_libsvm(data))
    text = emit_spectrum(str(path))
    spectrum, normalized = eigen_spectrum(data)
    assert normalized
    assert text == spectrum_csv(spectrum)
