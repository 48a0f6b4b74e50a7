import itertools
import math

import numpy as np
import pytest

from qmasat.errors import CompilationError, ConfigError, InputError
from qmasat.optics import (
    ACCEPT_CORRECTION,
    CircuitConfig,
    GateStage,
    PermStage,
    PhotonModel,
    channels,
    circuit_unitary,
    compile_clause_circuit,
    compile_encoding_circuit,
    compile_matching_circuit,
    compose,
    gaussian_sinc_profile,
    hom_scan,
    mode_index,
    mode_label,
    single_photon_dist,
    swap_reject_formula,
    two_photon_channels,
    waveplate_u,
)
from qmasat.sat import all_clauses24
from qmasat.states import cheat_common_var, overlap, proper_state, random_state
from qmasat.verifier import Matching, clause_projection_prob, enumerate_matchings, uniformity_outcome_dist

M0 = Matching(((1, 2), (3, 4), (5, 6)))
P0 = proper_state((0,) * 6)
P1 = proper_state((1, 0, 0, 0, 0, 0))
R2 = 1 / math.sqrt(2)


def is_unitary(u, tol=1e-12):
    return np.abs(u.conj().T @ u - np.eye(len(u))).max() <= tol


def test_mode_map_bijection():
    labels = [mode_label(i) for i in range(1, 7)]
    assert labels == [(1, "h"), (1, "v"), (2, "h"), (2, "v"), (3, "h"), (3, "v")]
    assert [mode_index(p, s) for p, s in labels] == list(range(1, 7))
    with pytest.raises(InputError):
        mode_label(7)


@pytest.mark.parametrize(
    "theta, expect",
    [(0, [[1, 0], [0, -1]]), (math.pi / 4, [[R2, R2], [R2, -R2]]), (math.pi / 2, [[0, 1], [1, 0]])],
)
def test_waveplate(theta, expect):
    np.testing.assert_allclose(waveplate_u(theta), expect, atol=1e-15)


def test_waveplate_reflection():
    for t in np.linspace(-3, 3, 11):
        u = waveplate_u(t)
        np.testing.assert_allclose(u @ u.T, np.eye(2), atol=1e-15)
        assert np.linalg.det(u) == pytest.approx(-1)


def test_empty_circuit_is_identity():
    np.testing.assert_array_equal(circuit_unitary(CircuitConfig(6)), np.eye(6))


def test_single_hadamard_stage():
    u = circuit_unitary(CircuitConfig(6, (GateStage(((1, 2, math.pi / 4),)),)))
    expect = np.eye(6)
    expect[:2, :2] = waveplate_u(math.pi / 4)
    np.testing.assert_allclose(u, expect, atol=1e-15)


def test_perm_stage_convention():
    u = circuit_unitary(CircuitConfig(3 * 2, (PermStage((2, 3, 1, 4, 5, 6)),)))
    # input mode 1 goes to output mode 2
    assert u[1, 0] == 1 and u[2, 1] == 1 and u[0, 2] == 1


def test_stage_order_later_on_left():
    a = GateStage(((1, 2, 0.3),))
    b = PermStage((2, 1, 3, 4))
    u = circuit_unitary(CircuitConfig(4, (a, b)))
    np.testing.assert_allclose(u, circuit_unitary(CircuitConfig(4, (b,))) @ circuit_unitary(CircuitConfig(4, (a,))))
    np.testing.assert_allclose(circuit_unitary(compose(CircuitConfig(4, (a,)), CircuitConfig(4, (b,)))), u)


@pytest.mark.parametrize(
    "stages",
    [
        (GateStage(((1, 2, 0.1), (2, 3, 0.2))),),
        (GateStage(((1, 1, 0.1),)),),
        (GateStage(((1, 7, 0.1),)),),
        (PermStage((1, 1, 2, 3, 4, 5)),),
    ],
)
def test_invalid_stages(stages):
    with pytest.raises(ConfigError):
        CircuitConfig(6, stages)


def test_circuit_json_roundtrip():
    c = compile_clause_circuit((1, 3, 4, 6))
    back = CircuitConfig.from_json(c.to_json())
    np.testing.assert_allclose(circuit_unitary(back), circuit_unitary(c))
    bare = CircuitConfig.from_json('{"stages":[{"gates":[[1,2,0.5]]},{"perm":[2,1,3,4]}],"measure":"modes"}')
    assert bare.n == 4
    with pytest.raises(ConfigError):
        CircuitConfig.from_json('{"stages":[{"twist":1}]}')


def test_clause_circuit_examples():
    c = compile_clause_circuit((1, 2, 3, 4))
    assert c.labels[0] == "c"
    assert single_photon_dist(proper_state((1, 1, 0, 0, 0, 0)), c)[0] == pytest.approx(0, abs=1e-15)
    assert single_photon_dist(P0, c)[0] == pytest.approx(2 / 3, abs=1e-15)


def test_clause_circuits_exhaustive():
    for clause in all_clauses24(6):
        c = compile_clause_circuit(clause)
        assert is_unitary(circuit_unitary(c))
        for a in itertools.product((0, 1), repeat=6):
            psi = proper_state(a)
            d = single_photon_dist(psi, c)
            assert abs(d[0] - clause_projection_prob(psi, clause)) <= 1e-10
            assert abs(d.sum() - 1) <= 1e-12


def test_clause_circuit_bad_input():
    with pytest.raises(InputError):
        compile_clause_circuit((1, 2, 3, 9))


def test_matching_circuit_examples():
    c = compile_matching_circuit(M0)
    assert c.labels == ("12+", "12-", "34+", "34-", "56+", "56-")
    d = single_photon_dist(P0, c)
    np.testing.assert_allclose(d, [1 / 3, 0, 1 / 3, 0, 1 / 3, 0], atol=1e-15)
    np.testing.assert_allclose(single_photon_dist(cheat_common_var(2), c), [1 / 7, 4 / 7, 1 / 7, 0, 1 / 7, 0], atol=1e-15)


def test_matching_circuits_exhaustive():
    for m in enumerate_matchings(6):
        c = compile_matching_circuit(m)
        assert is_unitary(circuit_unitary(c))
        for a in itertools.product((0, 1), repeat=6):
            psi = proper_state(a)
            d = single_photon_dist(psi, c)
            assert np.abs(d - uniformity_outcome_dist(psi, m)).max() <= 1e-10
            assert (d.reshape(3, 2) < 1e-15).sum() == 3


def test_matching_circuit_size_mismatch():
    with pytest.raises(CompilationError):
        compile_matching_circuit(Matching(((1, 2), (3, 4))), 6)


def test_random_distributions_sum_to_one():
    rng = np.random.default_rng(12)
    circuits = [compile_clause_circuit(c) for c in all_clauses24(6)] + [compile_matching_circuit(m) for m in enumerate_matchings(6)]
    for _ in range(100):
        psi = random_state(rng, 6)
        c = circuits[int(rng.integers(len(circuits)))]
        assert abs(single_photon_dist(psi, c).sum() - 1) <= 1e-12


def test_encoding_circuit_prepares_state():
    for psi in (P0, P1, cheat_common_var(2), cheat_common_var(5), np.eye(6)[3]):
        u = circuit_unitary(compile_encoding_circuit(psi))
        np.testing.assert_allclose(u[:, 0], psi, atol=1e-12)
    with pytest.raises(CompilationError):
        compile_encoding_circuit(np.array([1, 1j]) / math.sqrt(2))


# --- two-photon ------------------------------------------------------------


def test_channel_list():
    ch = channels(6)
    assert len(ch) == 15
    accept = {(a, b) for a, b, cls in ch if cls == "accept"}
    assert accept == {(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6)}


def test_identical_states_bunch():
    r = two_photon_channels(P0, P0)
    assert r.reject == pytest.approx(0, abs=1e-15)
    assert r.accept_raw == pytest.approx(1, abs=1e-10)


def test_swap_cross_check():
    assert two_photon_channels(P0, P1).reject == pytest.approx(5 / 18, abs=1e-12)


def test_distinguishable_photons_are_classical():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a, b = random_state(rng), random_state(rng)
        assert two_photon_channels(a, b, PhotonModel(0.0)).reject == pytest.approx(0.5, abs=1e-12)


def test_swap_identity_random_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        a, b = random_state(rng), random_state(rng)
        r = two_photon_channels(a, b)
        assert abs(r.reject - (1 - abs(overlap(a, b)) ** 2) / 2) <= 1e-9
        total = sum(r.coincidences.values()) + r.same_detector
        assert abs(total - 1) <= 1e-10
        assert min(r.coincidences.values()) >= -1e-15


def test_partial_distinguishability_formula():
    rng = np.random.default_rng(3)
    for g in (0.0, 0.3, 0.95, 1.0):
        a, b = random_state(rng), random_state(rng)
        assert two_photon_channels(a, b, PhotonModel(g)).reject == pytest.approx(swap_reject_formula(a, b, g), abs=1e-12)


def test_correction_is_three_halves_of_registered():
    for g in (0.5, 0.95, 1.0):
        r = two_photon_channels(P0, P0, PhotonModel(g))
        assert r.accept_corrected == pytest.approx(ACCEPT_CORRECTION * r.accept_registered)
        assert r.accept_corrected == pytest.approx((1 + g) / 2, abs=1e-12)


def test_swap_csv():
    lines = two_photon_channels(P0, P1).to_csv().splitlines()
    assert lines[0] == "channel,d1,d2,class,probability"
    assert len(lines) == 16
    assert lines[1].startswith("1-2,1,2,accept,")


def test_gamma_validation():
    with pytest.raises(InputError):
        PhotonModel(1.5)
    with pytest.raises(InputError):
        two_photon_channels(P0, proper_state((0, 0)))


# --- delay scan ------------------------------------------------------------


def test_hom_scan_identical_dip():
    model = PhotonModel(1.0, gaussian_sinc_profile(sigma=1.0, width=2.0))
    rows = hom_scan(P0, P0, [-50.0, 0.0, 50.0], model)
    assert rows[1]["reject"] == pytest.approx(0, abs=1e-12)
    assert rows[0]["reject"] == pytest.approx(0.5, abs=1e-9)
    assert rows[2]["reject"] == pytest.approx(0.5, abs=1e-9)


def test_hom_scan_complement_matches_identical():
    model = PhotonModel(1.0, gaussian_sinc_profile(1.0, 2.0, 0.9))
    delays = np.linspace(-3, 3, 13)
    same = hom_scan(P1, P1, delays, model)
    comp = hom_scan(P1, -P1, delays, model)
    for r, s in zip(same, comp):
        assert r["reject"] == pytest.approx(s["reject"], abs=1e-12)


def test_hom_scan_orthogonal_flat():
    model = PhotonModel(1.0, gaussian_sinc_profile())
    e = np.eye(6)
    assert all(r["reject"] == pytest.approx(0.5) for r in hom_scan(e[0], e[3], np.linspace(-2, 2, 9), model))


def test_hom_scan_profile_mapping_and_missing():
    model = PhotonModel(1.0, {0.0: 1.0, 1.0: 0.5})
    rows = hom_scan(P0, P0, [0.0, 1.0], model)
    assert [r["gamma"] for r in rows] == [1.0, 0.5]
    with pytest.raises(InputError):
        hom_scan(P0, P0, [2.0], model)
    with pytest.raises(InputError):
        hom_scan(P0, P0, [0.0], PhotonModel())
