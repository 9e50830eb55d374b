import json
import os
import subprocess

import numpy as np
import pytest

import aeiso


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_geometry_helpers():
    x = np.array([1.0, 2.0, 3.0])
    y = np.array([-2.0, 0.5, 4.0])
    assert aeiso.inner_by_polarization(x, y) == pytest.approx(aeiso.inner_product(x, y), abs=1e-12)
    assert aeiso.distance(x, y) == pytest.approx(np.linalg.norm(x - y))
    assert aeiso.affinely_independent(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert not aeiso.affinely_independent(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
    assert aeiso.affine_dimension(aeiso.sample_gaussian(3, 50, seed=1)) == 3


def test_extension_recovers_rotation():
    source = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    h = aeiso.EuclideanIsometry(rotation(0.3), np.array([2.0, -1.0]))
    ext, repair = aeiso.extend_finite_isometry(source, h.apply_rows(source))
    assert ext.approx_equal(h)
    assert repair < 1e-12
    assert ext.compose(ext.inverse()).approx_equal(aeiso.EuclideanIsometry.identity(2))


def test_extension_rejects_scaling():
    source = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert not aeiso.check_distance_preserving(source, 2.0 * source)["preserving"]
    with pytest.raises(aeiso.MathError) as err:
        aeiso.extend_finite_isometry(source, 2.0 * source)
    assert err.value.kind == "NotDistancePreserving"


def test_trilateration():
    anchors = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    z = aeiso.locate(anchors, [np.sqrt(2.0), 1.0, 1.0])
    np.testing.assert_allclose(z, [1.0, 1.0], atol=1e-12)
    with pytest.raises(aeiso.MathError) as err:
        aeiso.locate(anchors, [10.0, 1.0, 1.0])
    assert err.value.kind == "Infeasible"
    assert aeiso.equidistance_collapse(np.array([0.0, 1.0]), np.array([0.0, -1.0]), anchors[:2], 1e-12)


def test_robust_recovery_and_certificate():
    cs, truth, corrupted = aeiso.generate(3, 500, epsilon=0.1, seed=4)
    assert len(cs) == 500 and len(corrupted) == 50
    h, inliers = aeiso.recover_robust(cs)
    assert h.approx_equal(truth, 1e-6)
    assert sum(inliers) == 450
    assert aeiso.procrustes_fit(cs, inliers).approx_equal(truth, 1e-6)

    report = aeiso.certify(cs)
    assert report.violation_rate_hat == pytest.approx(0.1)
    low, high = report.confidence_interval
    assert low <= 0.1 <= high
    assert json.loads(aeiso.report_json(report))["outlier_count"] == 50


def test_oracle_and_failures():
    cs, truth, _ = aeiso.generate(2, 100, seed=2)
    assert aeiso.recover_oracle(cs).approx_equal(truth)

    flat, _, _ = aeiso.generate(3, 100, seed=2, measure="hyperplane")
    report = aeiso.certify(flat)
    assert report.support_dimension < 3
    assert report.recovered is None

    x = aeiso.sample_gaussian(2, 200, seed=3)
    y = x.copy()
    y[:, 0] += 0.5 * np.sum(x * x, axis=1)
    with pytest.raises(aeiso.MathError) as err:
        aeiso.recover_robust(aeiso.CorrespondenceSet(x, y))
    assert err.value.kind == "NoConsensus"

    with pytest.raises(ValueError):
        aeiso.CorrespondenceSet(np.zeros((3, 2)), np.zeros((4, 2)))
    cfg = aeiso.RecoveryConfig()
    cfg.consensus_quorum = 0.2
    with pytest.raises(ValueError):
        cfg.validate()


@pytest.mark.skipif("AEISO_CLI" not in os.environ, reason="command-line tool not located")
def test_bindings_match_command_line(tmp_path):
    out = tmp_path / "pairs.jsonl"
    subprocess.run([os.environ["AEISO_CLI"], "generate", "--d", "3", "--n", "40", "--epsilon", "0.1",
                    "--seed", "8", "--out", str(out)], check=True)
    cs, truth, corrupted = aeiso.generate(3, 40, epsilon=0.1, seed=8)
    sidecar = json.loads((tmp_path / "pairs.jsonl.truth.json").read_text())
    assert sidecar["corrupted"] == corrupted
    assert aeiso.EuclideanIsometry.from_json(json.dumps(sidecar["isometry"])).approx_equal(truth, 0.0)
    lines = out.read_text().splitlines()[1:]
    np.testing.assert_array_equal(np.array([json.loads(l)["x"] for l in lines]), cs.x)
