import math

import numpy as np
import pytest

import ghostsim as gs


def reference_axis(s, n=4001):
    half = gs.default_y2_half_width(s)
    return np.linspace(-half, half, n)


def test_reference_scenario_fringe_width():
    s = gs.ding_fig3()
    w = gs.fringe_width(s)
    assert w.simplified == pytest.approx(3.2955e-3, rel=1e-4)
    jd = gs.joint_density(s)
    y2 = reference_axis(s)
    r = gs.extract_fringes(y2, gs.coincidence_slice(jd, 0.0, y2))
    assert r.spacing == pytest.approx(w.simplified, rel=0.01)
    assert r.method == "spectral-peak"
    assert 0.9 < r.visibility <= 1.0


def test_density_is_vectorized_and_matches_slice():
    s = gs.ding_fig3()
    jd = gs.joint_density(s)
    y2 = reference_axis(s, 201)
    direct = jd(np.zeros_like(y2), y2)
    assert np.allclose(direct, gs.coincidence_slice(jd, 0.0, y2), rtol=1e-12, atol=0)
    assert np.all(direct >= 0)


def test_lens_shortens_fringes():
    s = gs.ding_fig3()
    s.f = 0.1
    jd = gs.joint_density(s)
    y2 = reference_axis(s)
    r = gs.extract_fringes(y2, gs.coincidence_slice(jd, 0.0, y2))
    assert r.spacing == pytest.approx(2.6715e-3, rel=0.01)
    s.f = None
    assert s.f is None


def test_bucket_table_and_marginal():
    s = gs.ding_fig3()
    jd = gs.joint_density(s)
    rows, monotone = gs.visibility_vs_bucket(jd, [0.2e-3, 1e-3], reference_axis(s))
    assert rows[0][1] > rows[1][1]
    assert monotone
    y1 = np.linspace(-20e-3, 20e-3, 4001)
    m = gs.marginal_particle1(jd, y1)
    assert gs.visibility_at(y1, m, 2 * math.pi / jd.theta1) < 1e-3


def test_uncertainty_minimum():
    s = gs.ding_fig3()
    s.omega = 1e-3
    s.ell_sigma = 2e-3
    u = gs.uncertainties(s)
    assert u.dy * u.dk == pytest.approx(0.5, abs=1e-9)


def test_errors_are_typed():
    with pytest.raises(gs.ConfigError):
        gs.Scenario(lambda1=-1.0, lambda2=780e-9, L1=1.0, L2=0.3, d=5e-4, epsilon=1e-4, ell_sigma=1e-5, omega=5e-3)
    y = np.linspace(0, 1, 100)
    with pytest.raises(gs.AnalysisError):
        gs.extract_fringes(y, np.ones_like(y))
    with pytest.raises(gs.AnalysisError):
        gs.extract_fringes(np.array([0.0, 0.1, 0.5, 1.0]), np.ones(4))
    assert issubclass(gs.AnalysisError, gs.Error)


def test_small_oracle_matches_analytic():
    s = gs.Scenario(lambda1=1e-6, lambda2=0.8e-6, L1=0.05, L2=0.02, d=0.3e-3, epsilon=0.08e-3,
                    ell_sigma=0.05e-3, omega=1e-3)
    run = gs.run_oracle(s, 512, 512)
    y1, y2, grid = run.joint
    jd = gs.joint_density(s)
    exact = jd(y1[:, None], y2[None, :])
    assert np.max(np.abs(grid - exact)) / exact.max() < 1e-6
    assert run.norm_drift < 1e-10
    assert run.norm_history[0][0] == "source"


def test_run_preset_yaml(tmp_path):
    text = gs.preset_yaml("ding-fig3")
    out = gs.run(text, output_dir=str(tmp_path))
    assert out["exit_code"] == 0
    assert "report.txt" in out["files"]
    assert "3.2955 mm" in out["report"]
    assert (tmp_path / "pattern_slice_0.csv").exists()
