import math

import pytest

try:
    import qclab._qclab as _qclab
except ImportError:
    _qclab = pytest.importorskip("_qclab")


def test_exponent_algebra():
    assert _qclab.t_prime(1.0, 2.0) == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert _qclab.t_prime(0.7, 1.0) == pytest.approx(0.7, rel=1e-14)
    idx = _qclab.indices_from_target(0.5, 2.0, 2.0)
    assert idx["t_prime"] == pytest.approx(1.0)
    assert idx["t"] == pytest.approx(2.0 / 3.0)


def test_sigma_guard():
    assert _qclab.derive_sigma(1e-4, 1.0, 2.0, 1.0) == pytest.approx(1e-2, rel=1e-12)
    with pytest.raises(ValueError):
        _qclab.derive_sigma(1e-2, 1.0, 2.0, 2.0)


def test_sharpness_verdicts():
    v = _qclab.sharpness(1.0, 2.0, 2.0, 4.0, n_max=20000)
    assert v["target_converges"]
    assert v["source_diverges"]
    assert v["source_log_slope"] == pytest.approx(1.0, abs=0.05)


def test_cantor_wolff_monotone():
    params = _qclab.CantorParams.uniform(2.0, 1.0, 50, 1e-5, 10**10)
    sums = _qclab.wolff_on_cantor(params, 0.5, 2.0, "target", 50)
    assert all(b >= a for a, b in zip(sums, sums[1:]))


def test_measure_wolff_scaling():
    mu = _qclab.DiscreteMeasure([(0.0, 0.0, 1.0), (1.0, 0.0, 0.5)])
    lam = 3.0
    mu_scaled = _qclab.DiscreteMeasure([(0.0, 0.0, lam), (1.0, 0.0, lam * 0.5)])
    p = 1.5
    w = mu.wolff(1.0, p, 0.25, 0.0)
    ws = mu_scaled.wolff(1.0, p, 0.25, 0.0)
    assert ws == pytest.approx(lam ** (p / (p - 1.0) - 1.0) * w, rel=1e-12)


def test_beurling_selftest():
    r = _qclab.beurling_disk_selftest(256)
    assert r["interior_max"] <= 0.05
    assert r["exterior_rel_err"] <= 0.10
