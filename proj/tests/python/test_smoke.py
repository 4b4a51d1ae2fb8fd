import json
import math

import numpy as np
import pytest

import gmclab


def test_version():
    assert gmclab.__version__ == "0.1.0"


def test_kernel_values():
    assert gmclab.regularized_covariance(0.25, 0.75, 7) == pytest.approx(2 * math.log(2), rel=1e-14)
    assert gmclab.regularized_covariance(0.3, 0.3, 10) == pytest.approx(
        2 * (10 * math.log(2) + 1), rel=1e-14
    )


def test_field_sampling_is_deterministic():
    v1, meta = gmclab.sample_field(6, 6, seed=42)
    v2, _ = gmclab.sample_field(6, 6, seed=42)
    assert np.array_equal(v1, v2)
    assert meta["method"] == "dense-factorization"
    assert meta["clip_magnitude"] == 0.0
    v3, meta3 = gmclab.sample_field(13, 13, seed=42)
    assert meta3["method"] == "circulant-embedding"
    assert len(v3) == 2**13


def test_lebesgue_and_interval_mass():
    leb = gmclab.lebesgue(8)
    assert leb.total == 1.0
    assert gmclab.interval_mass(leb, 3, 0) == pytest.approx(0.125, abs=0)
    mu = gmclab.build_measure(gamma=0.0, n=6, m=6, seed=1)
    assert np.allclose(mu.masses, 2.0**-6)


def test_welding_roundtrip():
    mu = gmclab.build_measure(gamma=2.0, n=8, m=8, seed=3, normalization="probability")
    h = gmclab.cdf(mu)
    hi = gmclab.invert(h)
    for t in (0.2, 0.5, 0.9):
        assert gmclab.evaluate(hi, gmclab.evaluate(h, t)) == pytest.approx(t, abs=1e-10)
    ident = gmclab.compose(hi, h)
    bp = ident.breakpoints
    assert np.allclose(ident.values, bp, atol=1e-10)


def test_partition_sum_closed_form():
    # lebesgue: 2^{n-1} n^{beta/2} 2^{-n beta}
    val = gmclab.partition_sum(gmclab.lebesgue(4), 4, 2.0)
    assert val == pytest.approx(0.125, rel=1e-12)


def test_energies():
    assert gmclab.log_energy(gmclab.lebesgue(8)) == pytest.approx(math.log(2) + 1.5, abs=1e-12)
    assert gmclab.riesz_energy(gmclab.lebesgue(8), 0.5) == pytest.approx(8 / 3, abs=1e-10)


def test_equilibrium_measure():
    res = gmclab.equilibrium_measure(6, list(range(64)))
    assert res["converged"] and res["descent_ok"]
    assert res["energy"] == pytest.approx(math.log(8), abs=0.02)


def test_hill_and_ks():
    rng = np.random.default_rng(0)
    pareto = 1.0 / rng.uniform(size=10000)
    index, se, k = gmclab.hill_tail_index(pareto, 0.05)
    assert 0.9 <= index <= 1.1
    a = rng.normal(size=500)
    b = rng.normal(size=500)
    _, p = gmclab.ks_two_sample(a, b)
    assert p > 0.001


def test_run_suite_json():
    cfg = json.loads(gmclab.default_config("scale-invariance"))
    cfg["replicas"] = 100
    out = json.loads(gmclab.run_suite(json.dumps(cfg)))
    assert out["suite"] == "scale-invariance"
    assert out["criteria"][0]["id"] == "scale-invariance-ks"
    rerun = json.loads(gmclab.run_suite(json.dumps(cfg)))
    assert out == rerun


def test_config_validation_error():
    cfg = json.loads(gmclab.default_config("moments"))
    cfg["params"]["q"] = 7.0
    with pytest.raises(RuntimeError):
        gmclab.run_suite(json.dumps(cfg))
