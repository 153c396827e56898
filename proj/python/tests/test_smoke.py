import math

import numpy as np
import pytest

import dicke


def jy_matrix(particles):
    # J_y in the |n, N-n> basis from the ladder operator J_+ = a^dagger b
    j = particles / 2
    jp = np.zeros((particles + 1, particles + 1), dtype=complex)
    for n in range(particles):
        m = n - j
        jp[n + 1, n] = math.sqrt(j * (j + 1) - m * (m + 1))
    return (jp - jp.conj().T) / 2j


def dense_rotation(particles, theta):
    w, v = np.linalg.eigh(jy_matrix(particles))
    return v @ np.diag(np.exp(-1j * theta * w)) @ v.conj().T


def test_dicke_state_amplitudes():
    d = dicke.dicke_state(6)
    expected = np.zeros(7)
    expected[3] = 1.0
    assert d.particles == 6
    np.testing.assert_array_equal(d.amplitudes, expected)
    with pytest.raises(ValueError):
        dicke.dicke_state(5)


@pytest.mark.parametrize("n", [2, 10, 40])
def test_dicke_xi_d_is_one_over_n_plus_two(n):
    state = dicke.SectoredState.from_pure(dicke.dicke_state(n))
    assert dicke.xi_d(state) == pytest.approx(1.0 / (n + 2), rel=1e-12)
    assert dicke.entanglement_depth_lower_bound(1.0 / (n + 2)) == n


def test_coherent_state_has_unit_squeezing():
    state = dicke.SectoredState.from_pure(dicke.spin_coherent_x(30))
    assert dicke.xi_s(state) == pytest.approx(1.0, rel=1e-12)
    assert dicke.xi_d(state) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.3, -1.7])
def test_rotation_matches_dense_exponential(theta):
    np.testing.assert_allclose(dicke.rotation_matrix(7, theta), dense_rotation(7, theta), atol=1e-12)


def test_likelihood_matches_dense_route():
    psi = dicke.gaussian_dicke(8, 2.0)
    state = dicke.SectoredState.from_pure(psi)
    outcomes, probs = dicke.likelihood(state, 0.4)
    # P(n | theta) = |<n| e^{i theta J_y} |psi>|^2
    expected = np.abs(dense_rotation(8, -0.4) @ psi.amplitudes) ** 2
    assert outcomes == [(8, n) for n in range(9)]
    np.testing.assert_allclose(probs, expected, atol=1e-12)


def test_loss_sector_weights_are_binomial():
    eta = 0.25
    state = dicke.lossy_dicke(4, eta)
    weights = state.weights()

    def pmf(k, n):
        return math.comb(n, k) * eta**k * (1 - eta) ** (n - k)

    for remaining in range(5):
        expected = sum(pmf(la, 2) * pmf(4 - remaining - la, 2) for la in range(3) if 0 <= 4 - remaining - la <= 2)
        assert weights.get(remaining, 0.0) == pytest.approx(expected, abs=1e-14)


def test_two_particle_phase_distribution():
    d = dicke.relative_phase_distribution(dicke.SectoredState.from_pure(dicke.dicke_state(2)), 15)
    theta = np.asarray(d["theta"])
    np.testing.assert_allclose(d["probabilities"], (1 - np.cos(2 * theta)) / 16, atol=1e-14)
    assert d["period_pi"]


def test_simulation_is_seeded():
    state = dicke.SectoredState.from_pure(dicke.dicke_state(20))
    a = dicke.simulate(state, 0.3, 50, 7, grid_points=1024)
    b = dicke.simulate(state, 0.3, 50, 7, grid_points=1024)
    assert a["theta_p"] == b["theta_p"]
    assert a["posterior"] == b["posterior"]
    assert abs(a["theta_p"] - 0.3) < 5 * a["d_theta"] + 0.05
    step = a["theta"][1] - a["theta"][0]
    p = np.asarray(a["posterior"])
    assert step * (p.sum() - 0.5 * (p[0] + p[-1])) == pytest.approx(1.0, abs=1e-9)


def test_dephasing_routes_agree_without_noise():
    assert dicke.dephasing_qubit_oracle(6, 0.0) == pytest.approx(1.0 / 8, rel=1e-12)
    assert dicke.dephased_dicke_xi(6, 0.0) == pytest.approx(1.0 / 8, rel=1e-12)


def test_sweep_output_is_reproducible():
    text = "experiment = fig2_gaussian\nn = 10..20:10\nsigma = 0..1\n"
    csv_a, sidecar_a = dicke.run_sweep(text)
    csv_b, sidecar_b = dicke.run_sweep(text)
    assert csv_a == csv_b
    assert sidecar_a == sidecar_b
    lines = csv_a.strip().split("\n")
    assert lines[0].startswith("state_family,N,parameter,xi_d")
    assert len(lines) == 5
    assert dicke.config_hash(text) in lines[1]


def test_invalid_config_raises():
    with pytest.raises(ValueError, match="n:"):
        dicke.run_sweep("experiment = fig2_gaussian\nn = 11\nsigma = 1\n")
    with pytest.raises(ValueError):
        dicke.run_sweep("bogus = 1\n")


def test_xi_s_undefined_for_zero_mean_spin():
    with pytest.raises(dicke.UndefinedMetric):
        dicke.xi_s(dicke.SectoredState.from_pure(dicke.dicke_state(10)))
