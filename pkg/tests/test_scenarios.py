import numpy as np
import pytest

from tdesim import (
    CorrelationMode,
    DensityOperator,
    QubitDensity,
    Register,
    SlotId,
    basis_index,
    dilation_from_round_trip,
    maximally_mixed,
    nonlinear_map,
    partial_trace,
    purity,
    qubit_state,
    run_displaced_backend,
    run_entropy_study,
    run_fig1,
    run_no_signaling,
    run_proper_vs_improper,
    run_reverse,
    subadditivity_margin,
    tensor,
    to_density,
    trace_norm_distance,
)

from conftest import random_density, random_pure

H_QUARTER = 0.8112781244591328


def _pure_input(beta_sq, site="1"):
    return qubit_state(site, 0, np.sqrt(1.0 - beta_sq), np.sqrt(beta_sq))


def test_fig1_matches_closed_form_on_spot_inputs():
    for b2 in (0.0, 0.2, 0.5, 0.64, 1.0):
        rep = run_fig1(_pure_input(b2))
        want = nonlinear_map(QubitDensity(1.0 - b2, b2)).to_matrix()
        np.testing.assert_allclose(rep.rho_out.matrix, want, atol=1e-12)


def test_fig1_zero_input_is_fixed():
    rep = run_fig1(_pure_input(0.0))
    np.testing.assert_allclose(rep.rho_out.matrix, [[1, 0], [0, 0]],
                               atol=1e-15)


def test_fig1_balanced_input_gives_balanced_output():
    rep = run_fig1(_pure_input(0.5))
    np.testing.assert_allclose(rep.rho_out.matrix, np.eye(2) / 2,
                               atol=1e-12)


def test_fig1_four_slot_state_amplitudes():
    # two slot pairs carry the expanded history; the closing gate leaves
    # exactly four product terms with weights a^2, ab, ba, b^2
    a, b = 0.6, 0.8
    rep = run_fig1(qubit_state("1", 0, a, b))
    st = rep.four_slot_state
    reg = st.register
    assert reg.slots == (SlotId("1", 1), SlotId("2", 0),
                         SlotId("1", 2), SlotId("2", 1))
    terms = {(0, 0, 0, 0): a * a, (0, 0, 1, 1): a * b,
             (1, 1, 0, 1): b * a, (1, 1, 1, 0): b * b}
    for levels, amp in terms.items():
        got = st.amplitudes[basis_index(reg, levels)]
        assert abs(got - amp) < 1e-12
    assert abs(purity(to_density(st)) - 1.0) < 1e-12


def test_fig1_rho_d_is_product_of_rho_s_marginals(rng):
    for _ in range(5):
        reg = Register((SlotId("1", 0),), (2,))
        rep = run_fig1(random_pure(rng, reg))
        slots = rep.rho_s.register.slots
        left = partial_trace(rep.rho_s, [slots[0]])
        right = partial_trace(rep.rho_s, [slots[1]])
        np.testing.assert_allclose(
            rep.rho_d.matrix, np.kron(left.matrix, right.matrix), atol=1e-12
        )


def test_fig1_entropy_report_keys():
    rep = run_fig1(_pure_input(0.3))
    assert set(rep.entropies) == {"input", "rho_s", "rho_d", "rho_out"}
    assert rep.entropies["input"] == 0.0
    assert abs(rep.entropies["rho_s"]) < 1e-12


def test_fig1_output_independent_of_tau():
    base = run_fig1(_pure_input(0.37), tau=1)
    for tau in (2, 3):
        rep = run_fig1(_pure_input(0.37), tau=tau)
        np.testing.assert_allclose(rep.rho_out.matrix, base.rho_out.matrix,
                                   atol=1e-12)
    with pytest.raises(ValueError):
        run_fig1(_pure_input(0.3), tau=0)


def test_fig1_accepts_channel_density_input():
    rep = run_fig1(QubitDensity(0.25, 0.75))
    want = nonlinear_map(QubitDensity(0.25, 0.75)).to_matrix()
    np.testing.assert_allclose(rep.rho_out.matrix, want, atol=1e-12)


def test_fig1_mixed_input_uncorrelated_copies(rng):
    reg = Register((SlotId("1", 0),), (2,))
    rho = random_density(rng, reg)
    rep = run_fig1(rho, policy=CorrelationMode.UNCORRELATED_COPIES)
    qd = QubitDensity.from_matrix(rho.matrix)
    np.testing.assert_allclose(rep.rho_out.matrix,
                               nonlinear_map(qd).to_matrix(), atol=1e-12)


def test_fig1_rejects_multi_slot_input(rng):
    reg = Register((SlotId("1", 0), SlotId("1", 1)), (2, 2))
    with pytest.raises(ValueError):
        run_fig1(random_pure(rng, reg))


def test_fig1_json_schema():
    body = run_fig1(_pure_input(0.5)).to_json_dict()
    assert set(body) == {"input", "rho_s", "rho_d", "rho_out", "entropies"}
    assert body["rho_out"]["slots"][0]["site"] == "2"


def test_reverse_recovers_input(rng):
    for b2 in (0.0, 0.25, 0.7, 1.0):
        rep = run_reverse(_pure_input(b2))
        assert abs(rep.fidelity - 1.0) < 1e-12
        assert abs(purity(rep.recovered) - 1.0) < 1e-12
        psi = rep.input_state.amplitudes
        np.testing.assert_allclose(rep.recovered.matrix,
                                   np.outer(psi, psi.conj()), atol=1e-12)


def test_reverse_slot_sits_one_dilation_late():
    rep = run_reverse(_pure_input(0.25), tau=2)
    assert rep.recovered_slot == SlotId("1", 4)
    assert abs(rep.fidelity - 1.0) < 1e-12


def test_reverse_preserves_purity_of_full_state():
    rep = run_reverse(_pure_input(0.3))
    assert abs(purity(to_density(rep.final_state)) - 1.0) < 1e-12


def test_reverse_rejects_mixed_input(rng):
    reg = Register((SlotId("1", 0),), (2,))
    with pytest.raises(ValueError):
        run_reverse(random_density(rng, reg))


def test_backend_is_linear_in_its_input(rng):
    reg = Register((SlotId("b", 0), SlotId("b", 1)), (2, 2))
    x, y = random_density(rng, reg), random_density(rng, reg)
    lam = 0.3
    mix = DensityOperator(reg, lam * x.matrix + (1 - lam) * y.matrix)
    out_mix = run_displaced_backend(mix, "b")
    out_sep = lam * run_displaced_backend(x, "b").matrix \
        + (1 - lam) * run_displaced_backend(y, "b").matrix
    np.testing.assert_allclose(out_mix.matrix, out_sep, atol=1e-12)


def test_backend_register_validation(rng):
    reg = Register((SlotId("b", 0), SlotId("c", 1)), (2, 2))
    with pytest.raises(ValueError):
        run_displaced_backend(random_density(rng, reg), "b")
    reg2 = Register((SlotId("b", 0), SlotId("b", 1)), (2, 2))
    with pytest.raises(ValueError):
        run_displaced_backend(random_density(rng, reg2), "b",
                              ancilla_site="b")


def test_no_signaling_outputs_are_flat():
    for basis in ("computational", "diagonal"):
        rep = run_no_signaling(basis)
        assert rep.max_deviation <= 1e-12
        assert rep.substitution_deviation <= 1e-12
        for _, prob, out in rep.outcomes:
            assert abs(prob - 0.5) < 1e-12
            np.testing.assert_allclose(out.matrix, np.eye(2) / 2,
                                       atol=1e-12)
    with pytest.raises(ValueError):
        run_no_signaling("circular")


def test_no_signaling_json_schema():
    body = run_no_signaling("computational").to_json_dict()
    assert set(body) == {"basis", "outcomes", "average", "max_deviation",
                         "substitution_deviation"}
    assert [o["label"] for o in body["outcomes"]] == ["0", "1"]


def test_propriety_computational_ensemble_splits():
    rep = run_proper_vs_improper()
    assert abs(rep.trace_distance - 1.0) < 1e-12
    np.testing.assert_allclose(rep.proper_output.matrix, [[1, 0], [0, 0]],
                               atol=1e-12)
    np.testing.assert_allclose(rep.improper_output.matrix, np.eye(2) / 2,
                               atol=1e-12)


def test_propriety_diagonal_ensemble_agrees():
    ens = [(0.5, qubit_state("1", 0, 1.0, 1.0)),
           (0.5, qubit_state("1", 0, 1.0, -1.0))]
    rep = run_proper_vs_improper(ens)
    assert rep.trace_distance < 1e-12
    np.testing.assert_allclose(rep.proper_output.matrix, np.eye(2) / 2,
                               atol=1e-12)


def test_propriety_singleton_ensemble_is_degenerate():
    rep = run_proper_vs_improper([(1.0, qubit_state("1", 0, 1.0, 0.0))])
    assert rep.trace_distance < 1e-12
    np.testing.assert_allclose(rep.proper_output.matrix, [[1, 0], [0, 0]],
                               atol=1e-12)


def test_propriety_ensemble_validation(rng):
    with pytest.raises(ValueError):
        run_proper_vs_improper([])
    with pytest.raises(ValueError):
        run_proper_vs_improper([(0.5, qubit_state("1", 0, 1, 0))])
    reg = Register((SlotId("1", 0),), (2,))
    with pytest.raises(ValueError):
        run_proper_vs_improper([(1.0, random_density(rng, reg))])


def test_entropy_study_trivial_point():
    rep = run_entropy_study(0.0, [0.0])
    vals = rep.points[0].values
    assert vals["S_in"] == 0.0
    assert vals["S_rho_d"] == 0.0
    assert vals["S_out"] == 0.0


def test_entropy_study_balanced_mixture():
    rep = run_entropy_study(0.5, [0.0, 0.25, 0.5])
    for p in rep.points:
        assert abs(p.values["S_in"] - 1.0) < 1e-12
        assert p.values["S_rho_d"] >= p.values["S_in"] - 1e-9
    mid = rep.points[-1].values
    assert abs(mid["S_rho_d"] - 2.0) < 1e-12
    assert abs(mid["S_out"] - H_QUARTER) < 1e-12
    assert 0.5 in rep.drop_points


def test_entropy_study_validation():
    with pytest.raises(ValueError):
        run_entropy_study(1.5, [0.0])
    with pytest.raises(ValueError):
        run_entropy_study(0.5, [2.0])
    with pytest.raises(ValueError):
        run_entropy_study(0.5, [0.0], tau=0)


def test_round_trip_dilation():
    assert dilation_from_round_trip(10.0, 0.0) == 0.0
    assert abs(dilation_from_round_trip(10.0, 0.8) - 4.0) < 1e-12
    assert abs(dilation_from_round_trip(1.0, 0.6) - 0.2) < 1e-12
    grid = np.linspace(0.0, 0.99, 50)
    lags = [dilation_from_round_trip(1.0, v) for v in grid]
    assert all(b > a for a, b in zip(lags, lags[1:]))
    with pytest.raises(ValueError):
        dilation_from_round_trip(1.0, 1.0)
    with pytest.raises(ValueError):
        dilation_from_round_trip(-1.0, 0.5)


def test_scenario_states_satisfy_subadditivity(rng):
    for b2 in (0.1, 0.5, 0.9):
        rep = run_fig1(_pure_input(b2))
        assert subadditivity_margin(rep.rho_s) >= -1e-9
        assert subadditivity_margin(rep.rho_d) >= -1e-9
