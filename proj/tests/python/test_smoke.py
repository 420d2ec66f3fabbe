import numpy as np
import pytest


def test_builtin_models(rrr):
    m1 = rrr.builtin_model(1)
    assert (m1.n_states, m1.n_meas, m1.n_params) == (3, 5, 13)
    assert m1.param_names[0] == "C_N_alpha"

    m2 = rrr.builtin_model(2, qbar=60.0)
    assert (m2.n_states, m2.n_meas, m2.n_params) == (3, 4, 10)
    np.testing.assert_allclose(
        m2.theta_initial,
        [4, 0.15, 0.2, -0.5, -11.5, -5, -1.38, -0.06, -0.01, 0.2],
    )

    m3 = rrr.builtin_model(3)
    assert (m3.n_states, m3.n_meas, m3.n_params) == (4, 5, 20)

    with pytest.raises(rrr.ConfigError):
        rrr.builtin_model(2)  # case-2 needs a dynamic pressure


def test_model_evaluation(rrr):
    m = rrr.builtin_model(1)
    xdot = m.dynamics(np.zeros(3), np.zeros(13), np.zeros(6))
    np.testing.assert_allclose(xdot, [32.2 / 403.1, 0.0, 0.0], atol=1e-12)
    z = m.measurement(np.zeros(3), np.zeros(13), np.zeros(6))
    assert z.shape == (5,)
    np.testing.assert_allclose(z, 0.0, atol=1e-12)


def test_simulation_determinism(rrr):
    m = rrr.builtin_model(1)
    cfg = rrr.default_sim_config(1, m)
    cfg.n_samples = 200
    cfg.seed = 7
    a = rrr.simulate_dataset(m, cfg)
    b = rrr.simulate_dataset(m, cfg)
    assert a.dataset.z.shape == (200, 5)
    np.testing.assert_array_equal(a.dataset.z, b.dataset.z)
    np.testing.assert_array_equal(a.truth.x_true, b.truth.x_true)
    assert a.dataset.channel_names() == ["de", "phi", "beta", "p", "r", "alpha"]
    # shared column: the alpha input carries the alpha measurement
    np.testing.assert_array_equal(a.dataset.channel("alpha"), a.dataset.z[:, 0])


def test_fit_and_report(rrr, tmp_path):
    m = rrr.builtin_model(1)
    sim = rrr.default_sim_config(1, m)
    sim.n_samples = 250
    sim.seed = 3
    res = rrr.simulate_dataset(m, sim)

    cfg = rrr.RecipeConfig()
    cfg.method = "reference"
    cfg.max_iterations = 3
    rep = rrr.run_estimation(m, res.dataset, cfg)

    assert rep.method == "reference"
    assert rep.iterations_run == 3
    assert rep.theta.shape == (13,)
    assert rep.sigma_theta.shape == (13,)
    assert rep.costs.shape == (3, 8)
    assert rep.corr_100.shape == (13, 13)
    assert np.all(np.diag(rep.corr_100) == 100)
    assert np.array_equal(rep.corr_100, rep.corr_100.T)
    assert rep.residues.innovation.shape == (5, 250)

    out = tmp_path / "report"
    rrr.write_report(rep, str(out))
    for name in (
        "theta.csv",
        "corr100.csv",
        "qr.csv",
        "costs.csv",
        "residues.csv",
        "trajectory.csv",
        "flags.txt",
    ):
        assert (out / name).exists()


def test_dataset_roundtrip(rrr, tmp_path):
    m = rrr.builtin_model(1)
    sim = rrr.default_sim_config(1, m)
    sim.n_samples = 60
    res = rrr.simulate_dataset(m, sim)
    path = tmp_path / "data.csv"
    rrr.write_dataset(m, res.dataset, str(path))
    back = rrr.read_dataset(m, str(path))
    np.testing.assert_array_equal(back.z, res.dataset.z)
    np.testing.assert_array_equal(back.time, res.dataset.time)


def test_diagnostics_helpers(rrr):
    pct = rrr.crb_percent(np.array([4.6469]), np.array([[0.0179**2]]))
    assert pct[0] == pytest.approx(0.385, abs=5e-4)

    corr = rrr.correlation_matrix(np.array([[4.0, -2.0], [-2.0, 1.0]]))
    assert corr[0, 1] == -100

    m = rrr.builtin_model(1)
    sim = rrr.default_sim_config(1, m)
    sim.n_samples = 250
    res = rrr.simulate_dataset(m, sim)
    cfg = rrr.RecipeConfig()
    cfg.max_iterations = 2
    rep = rrr.run_estimation(m, res.dataset, cfg)
    weak = rrr.weak_parameter_screen(rep, threshold=0.0)
    assert len(weak) == 13  # everything flagged at a zero threshold
    names = [w[0] for w in weak]
    assert "theta_0" in names
