import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import ContradictionRejected, InvariantViolation, UnknownPowerError
from hilbert import Basis, HermitianOperator, StateVector, identity, pauli
from logic_c1 import Atom, Conj, Impl, WeakNeg, strong_neg
from powers import (DIFFERENT_CONTEXT, NON_ORTHOGONAL, NOT_EIGENVECTOR, NOT_EXHAUSTIVE, PSA, SAME_EIGENVALUE,
                    ActualEffectuation, Consistency, ContradictoryPair, Power, PTruth, QuantumStatement, actual_truth,
                    actualize, build_quantum_situation, declare_contradictory, effectuations, evolve_psa, laboratory,
                    p_true_statements, p_truth, potential_consistency_check, powers_of, psa_fingerprint,
                    psa_to_json, run_experiment, square_of_opposition_check, sr_holds, superposition_formula)

P_UP, P_DOWN = Atom("P_up"), Atom("P_down")


@pytest.fixture
def z_basis():
    return Basis.standard(2, "z", ("P_up", "P_down"))


@pytest.fixture
def sg_qs(stern_gerlach):
    return stern_gerlach.situation("psi", "z")


@pytest.fixture
def sg_pair(stern_gerlach):
    return stern_gerlach.pairs_for("z")[0]


@pytest.fixture
def up_qs(eigenstate):
    return eigenstate.situation("up", "z")


# ---------------------------------------------------------------------------
# Quantum situations
# ---------------------------------------------------------------------------

def test_situation_of_superposition(z_basis):
    psa = PSA("psi", StateVector(np.array([0.6, 0.8])))
    qs = build_quantum_situation(psa, z_basis)
    assert qs.names == ("P_up", "P_down")
    assert_allclose(qs.potentias, [0.36, 0.64], atol=1e-12)
    assert qs.superposition_text() == "0.6|P_up> + 0.8|P_down>"


def test_eigenstate_keeps_zero_potentia(up_qs):
    assert up_qs.names == ("P_up", "P_down")
    assert_allclose(up_qs.potentias, [1.0, 0.0], atol=1e-12)


def test_bases_give_different_situations(scenario_path):
    from scenario import load_scenario
    generic = load_scenario(scenario_path("generic"))
    z, x = laboratory(generic.psa("psi"), [generic.basis("z"), generic.basis("x")])
    assert z.basis_label == "z" and x.basis_label == "x"
    assert not z.same_pairs(x)
    assert_allclose(x.potentias, [0.02, 0.98], atol=1e-12)


def test_situation_frame(sg_qs):
    frame = sg_qs.to_frame()
    assert list(frame.columns) == ["Power", "Potentia"]
    assert list(frame["Power"]) == ["P_up", "P_down"]


def test_psa_identity_is_basis_free():
    v = StateVector(np.array([0.6, 0.8]))
    assert PSA("a", v) == PSA("b", StateVector(np.array([0.6, 0.8])))
    assert PSA("a", v) != PSA("a", StateVector(np.array([0.8, 0.6])))


def test_power_ray_is_phase_canonical():
    power = Power("P", StateVector(np.array([-1.0, 0.0])), "z")
    assert_allclose(power.ray.amplitudes, [1.0, 0.0])
    with pytest.raises(InvariantViolation):
        Power("not a name", StateVector(np.array([1.0, 0.0])), "z")


# ---------------------------------------------------------------------------
# p-truth
# ---------------------------------------------------------------------------

def test_p_truth(z_basis, e1):
    psa = PSA("psi", StateVector(np.array([0.6, 0.8])))
    assert p_truth(QuantumStatement("P_up", 0.36, "psi"), psa, z_basis) is PTruth.P_TRUE
    assert p_truth(QuantumStatement("P_up", 0.5, "psi"), psa, z_basis) is PTruth.P_FALSE
    up = PSA("up", e1)
    assert p_truth(QuantumStatement("P_down", 0.5, "up"), up, z_basis) is PTruth.P_FALSE
    assert p_truth(QuantumStatement("P_down", 0.0, "up"), up, z_basis) is PTruth.P_FALSE
    with pytest.raises(UnknownPowerError):
        p_truth(QuantumStatement("P_left", 0.5, "up"), up, z_basis)


def test_superposed_contradictories_are_both_p_true(stern_gerlach):
    psa, basis = stern_gerlach.psa("psi"), stern_gerlach.basis("z")
    for name in ("P_up", "P_down"):
        assert p_truth(QuantumStatement(name, 0.5, "psi"), psa, basis) is PTruth.P_TRUE


def test_p_true_statements(up_qs, sg_qs):
    assert [s.power for s in p_true_statements(up_qs)] == ["P_up"]
    assert [s.power for s in p_true_statements(sg_qs)] == ["P_up", "P_down"]


def test_statement_potentia_range():
    with pytest.raises(InvariantViolation):
        QuantumStatement("P_up", 1.5, "psi")


# ---------------------------------------------------------------------------
# Contradictory powers
# ---------------------------------------------------------------------------

def test_declare_contradictory_accepts_spin_pairs(z_basis, sigma_z, sigma_x):
    up, down = powers_of(z_basis)
    pair = declare_contradictory(up, down, sigma_z)
    assert (pair.power_a, pair.power_b, pair.observable) == ("P_up", "P_down", "sigma_z")
    assert pair.eigenvalues == pytest.approx((1.0, -1.0))

    s = 1 / np.sqrt(2)
    x_basis = Basis("x", (StateVector(np.array([s, s])), StateVector(np.array([s, -s]))), ("P_plus", "P_minus"))
    plus, minus = powers_of(x_basis)
    assert declare_contradictory(plus, minus, sigma_x).eigenvalues == pytest.approx((1.0, -1.0))


@pytest.mark.parametrize("case, reason", [
    ("non_orthogonal", NON_ORTHOGONAL),
    ("not_eigenvectors", NOT_EIGENVECTOR),
    ("same_eigenvalue", SAME_EIGENVALUE),
    ("different_context", DIFFERENT_CONTEXT),
])
def test_declare_contradictory_rejections(case, reason, z_basis, sigma_z):
    s = 1 / np.sqrt(2)
    up, down = powers_of(z_basis)
    diagonal = Power("P_diag", StateVector(np.array([s, s])), "z")
    x_basis = Basis("x", (StateVector(np.array([s, s])), StateVector(np.array([s, -s]))), ("P_plus", "P_minus"))
    plus, minus = powers_of(x_basis)
    args = {
        "non_orthogonal": (up, diagonal, sigma_z),
        "not_eigenvectors": (plus, minus, sigma_z),
        "same_eigenvalue": (up, down, identity(2)),
        "different_context": (up, minus, sigma_z),
    }[case]
    with pytest.raises(ContradictionRejected) as info:
        declare_contradictory(*args)
    assert info.value.reason == reason


def test_pair_must_exhaust_its_context():
    basis = Basis.standard(3, "s", ("P_a", "P_b", "P_c"))
    obs = HermitianOperator(np.diag([1.0, 0.0, -1.0]) + 0j, label="obs")
    p_a, p_b, _ = powers_of(basis)
    with pytest.raises(ContradictionRejected) as info:
        declare_contradictory(p_a, p_b, obs)
    assert info.value.reason == NOT_EXHAUSTIVE


def test_superposition_formula(sg_qs, sg_pair, up_qs):
    assert superposition_formula(sg_qs, [sg_pair]) == (
        Conj(P_UP, WeakNeg(P_UP)), Conj(P_DOWN, WeakNeg(P_DOWN)))
    assert superposition_formula(up_qs, [sg_pair]) == ()
    reinforced = superposition_formula(sg_qs, [sg_pair], reinforce=True)
    assert reinforced[2:] == (Impl(P_UP, WeakNeg(P_UP)), Impl(P_DOWN, WeakNeg(P_DOWN)))


def test_superposition_formula_unknown_power(sg_qs):
    with pytest.raises(UnknownPowerError):
        superposition_formula(sg_qs, [ContradictoryPair("P_up", "P_left", "sigma_z")])


def test_weak_contradictions_do_not_trivialize(sg_qs, sg_pair):
    for reinforce in (False, True):
        report = potential_consistency_check(superposition_formula(sg_qs, [sg_pair], reinforce))
        assert report.classification is Consistency.WEAKLY_INCONSISTENT_NONTRIVIAL
        assert set(report.contradictions) == {P_UP, P_DOWN}
        assert report.witness["P_up"] == 1 and report.witness["~P_up"] == 1


def test_consistency_classes():
    assert potential_consistency_check([P_UP, strong_neg(P_UP)]).classification is Consistency.TRIVIAL
    assert potential_consistency_check([]).classification is Consistency.CONSISTENT
    assert potential_consistency_check([P_UP]).classification is Consistency.CONSISTENT


# ---------------------------------------------------------------------------
# Actualization and experiments
# ---------------------------------------------------------------------------

def test_eigenstate_actualizes_deterministically(up_qs):
    for seed in range(50):
        assert actualize(up_qs, seed).selected == "P_up"
    assert run_experiment(up_qs, 100, 5).counts == (100, 0)


def test_actualize_is_reproducible(sg_qs):
    first = actualize(sg_qs, 42)
    assert first == actualize(sg_qs, 42)
    # first PCG64 draw for seed 42 is 0.7739..., above the P_up cut at 0.5
    assert first.selected == "P_down"
    assert first.generator == "PCG64" and first.seed == 42 and first.shot == 0


def test_shot_k_matches_the_stream(sg_qs):
    records = list(effectuations(sg_qs, 64, 9))
    assert [r.shot for r in records] == list(range(64))
    for k in (0, 1, 17, 63):
        assert records[k] == actualize(sg_qs, 9, shot=k)


def test_every_effectuation_has_exactly_one_true_power(sg_qs):
    assert all(sr_holds(e) for e in effectuations(sg_qs, 1000, 3))


def test_counts_match_effectuations(thirds):
    qs = thirds.situation("psi", "z")
    result = run_experiment(qs, 500, 77)
    selected = [e.selected for e in effectuations(qs, 500, 77)]
    assert result.counts == (selected.count("P_up"), selected.count("P_down"))
    assert sum(result.counts) == 500


@pytest.mark.parametrize("shots", [0, -3, 2.5, True])
def test_invalid_shot_counts(sg_qs, shots):
    with pytest.raises(InvariantViolation):
        run_experiment(sg_qs, shots, 1)


@pytest.mark.parametrize("fixture, psa", [("stern_gerlach", "psi"), ("thirds", "psi")])
@pytest.mark.parametrize("shots, seed", [(1000, 1), (10_000, 2), (100_000, 3)])
def test_frequencies_within_four_sigma(request, fixture, psa, shots, seed):
    qs = request.getfixturevalue(fixture).situation(psa, "z")
    result = run_experiment(qs, shots, seed)
    assert result.within_bounds()
    frame = result.to_frame()
    assert list(frame.columns) == ["Power", "Potentia", "Count", "Frequency", "Bound"]


def test_four_sigma_bounds(sg_qs, thirds):
    assert run_experiment(sg_qs, 100_000, 42).bounds()[0] == pytest.approx(0.0063, abs=1e-4)
    qs = thirds.situation("psi", "z")
    assert run_experiment(qs, 100_000, 42).bounds()[1] == pytest.approx(0.0060, abs=1e-4)


def test_measurement_does_not_collapse(stern_gerlach):
    psa = stern_gerlach.psa("psi")
    qs = build_quantum_situation(psa, stern_gerlach.basis("z"))
    before = (psa_fingerprint(psa), psa_to_json(psa))
    for e in effectuations(qs, 10_000, 11):
        assert sr_holds(e)
    run_experiment(qs, 10_000, 12)
    assert (psa_fingerprint(psa), psa_to_json(psa)) == before
    assert actualize(qs, 13).selected == actualize(qs, 13).selected


def test_fingerprint_follows_the_canonical_json():
    psa = PSA("psi", StateVector(np.array([0.6, 0.8])))
    assert psa_to_json(psa) == '{"id":"psi","psi":[[0.6,0.0],[0.8,0.0]]}'
    nudged = PSA("psi", StateVector(np.array([0.6, 0.8 + 1e-15])))
    assert psa_fingerprint(nudged) != psa_fingerprint(psa)
    assert psa_fingerprint(PSA("phi", psa.psi)) != psa_fingerprint(psa)


def test_evolution_ignores_interleaved_measurements(scenario_path):
    from scenario import load_scenario
    rabi = load_scenario(scenario_path("rabi"))
    h, basis = rabi.observable("h_rabi"), rabi.basis("z")
    quiet = noisy = rabi.psa("ground")
    for step in range(20):
        quiet = evolve_psa(quiet, h, 0.3)
        noisy = evolve_psa(noisy, h, 0.3)
        run_experiment(build_quantum_situation(noisy, basis), 200, step)
        actualize(build_quantum_situation(noisy, basis), step)
    assert_allclose(noisy.psi.amplitudes, quiet.psi.amplitudes, atol=1e-9)
    assert noisy.psa_id == "ground"


def test_square_of_opposition(sg_qs, sg_pair):
    report = square_of_opposition_check(sg_pair, effectuations(sg_qs, 1000, 21))
    assert report.passed and report.checked == 1000

    empty = square_of_opposition_check(sg_pair, [])
    assert empty.passed and empty.checked == 0

    forged = ActualEffectuation("P_up", (("P_up", True), ("P_down", True)), 0, 0)
    assert not sr_holds(forged)
    flagged = square_of_opposition_check(sg_pair, [forged])
    assert flagged.violations == ((0, "both actually true"),)


def test_actual_truth(sg_qs):
    e = actualize(sg_qs, 42)
    assert actual_truth(QuantumStatement("P_down", 0.5, "psi"), e)
    assert not actual_truth(QuantumStatement("P_up", 0.5, "psi"), e)
    with pytest.raises(UnknownPowerError):
        actual_truth(QuantumStatement("P_left", 0.5, "psi"), e)


def test_pauli_helper_labels():
    assert pauli("sigma_x").label == "sigma_x"
