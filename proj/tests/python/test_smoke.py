import json
import math

import numpy as np
import pytest

import isostab as iso


def test_version():
    assert iso.__version__


def test_eval_graph_sqrt():
    spec = iso.graph_sqrt(0.1)
    fx = iso.eval_map(spec, np.array([1.0]))
    assert fx[0] == 1.0
    assert fx[1] == pytest.approx(math.sqrt(0.2), abs=1e-15)
    assert np.all(iso.eval_map(spec, np.array([0.0])) == 0.0)


def test_certify_families():
    sampler = iso.SamplerConfig(n=2000, radius=50.0, seed=1)
    assert iso.certify(iso.graph_sqrt(0.1), sampler).certified
    rep = iso.certify(iso.point_perturb(0.1, 1.0), sampler)
    assert rep.certified
    assert 0.0 < rep.max_violation < 0.1


def test_certify_flags_violations():
    bad = iso.graph_family(0.1, [50.0, 100.0], [50.0, 100.0])
    ok, why = iso.graph_family_admissible(bad)
    assert not ok and why
    rep = iso.certify(bad, iso.SamplerConfig(n=2000, radius=100.0, seed=2))
    assert not rep.certified


def test_extraction_recovers_the_isometry():
    spec = iso.graph_sqrt(0.1)
    res, frame = iso.assemble_frame(spec, iso.ExtractionConfig(tol=1e-6))
    assert res.converged
    assert abs(frame.U[0, 0]) == pytest.approx(1.0, abs=1e-9)
    assert abs(frame.U[1, 0]) < 1e-6
    dev = iso.frame_deviations(frame)
    assert dev.p_idempotent <= 1e-10
    assert dev.t_op_norm == pytest.approx(1.0, abs=1e-9)


def test_bounds_hold_for_certified_maps():
    spec = iso.graph_sqrt(0.1)
    _, frame = iso.assemble_frame(spec)
    rep = iso.verify_bounds(spec, frame, iso.SamplerConfig(n=500, seed=3))
    assert rep.all_pass
    assert len(rep.samples) >= 500
    sample = iso.residual_at(spec, frame, np.array([1.0]))
    assert sample.k_norm == pytest.approx(math.sqrt(0.2), abs=1e-6)


def test_prooftrace_ops():
    spec = iso.graph_sqrt(0.1)
    x = np.array([1.0])
    assert iso.ball_membership(spec, x, 4) == (True, True)
    y = iso.eval_map(spec, x)
    check = iso.midpoint_inequality(spec, x, 4, y)
    assert check.lhs == pytest.approx(0.05, abs=1e-12)
    assert check.rhs == pytest.approx(0.458125, abs=1e-12)
    assert check.holds
    assert iso.midpoint_defect(spec, np.array([0.0]), np.array([4.0])) == \
        pytest.approx(abs(math.sqrt(0.4) - math.sqrt(0.8) / 2), abs=1e-12)


def test_spec_json_round_trip():
    spec = iso.point_perturb(0.1, 1.0 / 3.0)
    doc = json.loads(spec.to_json())
    assert doc["family"] == "PointPerturb"
    back = iso.map_spec_from_json(spec.to_json())
    assert back.params == spec.params


def test_errors_surface_as_python_exceptions():
    with pytest.raises(Exception):
        iso.graph_sqrt(1e-9)  # epsilon below the supported range
    with pytest.raises(Exception):
        iso.eval_map(iso.graph_sqrt(0.1), np.array([1.0, 2.0]))


def test_small_search():
    cfg = iso.SearchConfig(epsilon=0.1, knot_count=4, t_max=1000.0,
                           iterations=4, restarts=2, seed=5)
    result = iso.search_sharp_A(cfg)
    assert 0.19 <= result.A_hat <= 0.6 + 1e-6
    assert result.certified_witness
    assert result.witness.family == "GraphFamily"
    # Reports are deterministic for a fixed config.
    again = iso.search_sharp_A(cfg)
    assert iso.serialize_search(cfg, again) == iso.serialize_search(cfg, result)
