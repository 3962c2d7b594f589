import math

import numpy as np
import pytest

from ci_toolkit.ci import (
    ci_lower,
    ci_product_regularized,
    ci_pure_oneway,
    ci_pure_regularized,
    ci_upper,
    dilated_protocol_state,
    discord_additivity_check,
    discord_via_ci,
    family15_separation_report,
    family15_two_round_merge,
    lqsm_fidelity_lower,
    merge_conditional_entropy_check,
    monotone_necessary_check,
    oneway_ci_upper,
    resolve_tripartite,
)
from ci_toolkit.errors import (
    DimensionTooLarge,
    DuplicateParty,
    InvalidArgument,
    LayoutMismatch,
    NotPure,
    NotRankOne,
    ShapeMismatch,
)
from ci_toolkit.info import (
    Partition,
    binary_entropy,
    conditional_mutual_info,
    mutual_info,
)
from ci_toolkit.measures import (
    LOWER,
    coherent_info_lower,
    discord,
    flag_state,
    log_negativity,
    measure_ensemble,
)
from ci_toolkit.optim import OptimizerConfig, Povm, haar_unitary, rank1_povm
from ci_toolkit.states import (
    Mstate,
    SystemLayout,
    partial_trace,
    preset,
    random_mixed_state,
)

CFG = OptimizerConfig(restarts=8, max_iters=600, tol=1e-5, seed=17)
C_STAR = math.cos(math.pi / 8.0)


def test_resolve_tripartite_defaults_and_explicit():
    ghz = preset("ghz")
    assert resolve_tripartite(ghz.layout) == (("A",), ("B",), ("C",))
    assert resolve_tripartite(ghz.layout, "C", "A") == (("C",), ("A",), ("B",))
    four = preset("product_eq10", (0.0,)).layout
    a, b, c = resolve_tripartite(four)
    assert c == ("B2", "C")
    assert resolve_tripartite(four, ("A", "B1"), "B2", "C")[0] == ("A", "B1")


def test_resolve_tripartite_errors():
    bell = preset("bell")
    with pytest.raises(LayoutMismatch):
        resolve_tripartite(bell.layout)  # two parties, no defaults possible
    ghz = preset("ghz")
    with pytest.raises(LayoutMismatch):
        resolve_tripartite(ghz.layout, "A", "A", "B")
    with pytest.raises(LayoutMismatch):
        resolve_tripartite(ghz.layout, "A", "B", ())


def test_ci_upper_ghz():
    assert np.isclose(ci_upper(preset("ghz")), 2.0, atol=1e-9)


def test_ci_upper_distillable_cap_beats_total():
    rho = preset("product_eq10", (0.0,))
    # reference is maximally entangled with the helper only: nothing is
    # distillable toward the receiver, so the cap collapses to S(reference)
    assert np.isclose(ci_upper(rho), 1.0, atol=1e-9)
    assert np.isclose(mutual_info(rho, Partition("A", ("B1", "B2", "C"))), 2.0)


def test_ci_lower_report_on_ghz():
    report = ci_lower(preset("ghz"), config=CFG)
    assert report.upper == pytest.approx(2.0, abs=1e-9)
    assert report.lower <= report.upper + 1e-9
    assert report.lower >= 2.0 - 5e-3
    assert report.lower_source == "optimized-one-way"
    assert {c.name for c in report.lower_candidates} == {
        "trivial-protocol",
        "discord-gap",
        "optimized-one-way",
    }
    assert {c.name for c in report.upper_candidates} == {
        "total-mutual-info",
        "entropy-plus-distillable",
    }
    assert report.details["one_way"].direction == LOWER
    trivial = [c for c in report.lower_candidates if c.name == "trivial-protocol"][0]
    assert trivial.value == pytest.approx(1.0, abs=1e-9)


def test_ci_lower_bracket_on_random_mixed():
    rho = random_mixed_state(SystemLayout((("A", 2), ("B", 2), ("C", 2))), 5, rank=3)
    cfg = OptimizerConfig(restarts=4, max_iters=400, tol=1e-4, seed=19)
    report = ci_lower(rho, config=cfg)
    assert report.lower <= report.upper + 1e-9
    trivial = [c for c in report.lower_candidates if c.name == "trivial-protocol"][0]
    assert report.lower >= trivial.value - 1e-12
    assert report.details["ed_upper"] >= 0.0


def test_ci_pure_oneway_ghz():
    est = ci_pure_oneway(preset("ghz"), config=CFG)
    assert est.value == pytest.approx(2.0, abs=5e-3)
    assert est.value <= 2.0 + 1e-9
    assert est.direction == LOWER
    assert est.info["marginal_entropy"] == pytest.approx(1.0, abs=1e-12)
    assert est.info["assisted_entanglement"] == pytest.approx(1.0, abs=5e-3)


def test_ci_pure_oneway_rejects_mixed():
    iso = Mstate(SystemLayout((("A", 2), ("B", 2), ("C", 2))), np.eye(8) / 8.0)
    with pytest.raises(NotPure):
        ci_pure_oneway(iso)


def test_ci_pure_regularized_closed_forms():
    assert ci_pure_regularized(preset("ghz")) == pytest.approx(2.0, abs=1e-12)
    assert ci_pure_regularized(preset("w")) == pytest.approx(
        2.0 * binary_entropy(1.0 / 3.0), abs=1e-12
    )
    # symmetric regrouping of the same state gives the same rate
    assert ci_pure_regularized(preset("ghz"), "C", "A", "B") == pytest.approx(
        2.0, abs=1e-12
    )
    with pytest.raises(NotPure):
        ci_pure_regularized(preset("classical_classical"), "A", "B", ())


def test_ci_product_regularized_exact_at_zero():
    rho = preset("product_eq10", (0.0,))
    band = ci_product_regularized(rho, "A", "B1", "B2", "C")
    assert band.exact
    assert band.lower == pytest.approx(1.0, abs=1e-9)
    assert band.upper == band.lower


def test_ci_product_regularized_generic_band():
    rho = preset("product_eq10", (0.5,))
    band = ci_product_regularized(rho, "A", "B1", "B2", "C")
    right = partial_trace(rho, ("A", "B1"))
    lo = 1.0 + min(1.0, coherent_info_lower(right, Partition("B2", "C")))
    hi = 1.0 + min(1.0, log_negativity(right, Partition("B2", "C")))
    assert band.lower == pytest.approx(lo, abs=1e-12)
    assert band.upper == pytest.approx(hi, abs=1e-12)
    assert band.lower <= band.upper + 1e-12


def test_ci_product_regularized_rejects_bad_factorization():
    rho = preset("product_eq10", (0.5,))
    with pytest.raises(ShapeMismatch):
        ci_product_regularized(rho, "A", "B2", "B1", "C")
    with pytest.raises(NotPure):
        ci_product_regularized(rho, "B2", "C", "A", "B1")


def test_discord_via_ci_matches_direct():
    bell = preset("bell").to_mstate()
    via = discord_via_ci(bell, "A", "B", CFG)
    direct = discord(bell, "A", "B", CFG)
    assert abs(via.value - direct.value) <= 2e-2
    assert via.info["mutual_info"] == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(LayoutMismatch):
        discord_via_ci(preset("ghz"), "A", ("B", "C"), CFG)


def test_lqsm_fidelity_lower():
    ghz = preset("ghz")
    assert lqsm_fidelity_lower(ghz, 2.0) == 1.0
    assert lqsm_fidelity_lower(ghz, 0.0) == pytest.approx(0.5, abs=1e-12)
    assert lqsm_fidelity_lower(ghz, 2.0 + 5e-10) == 1.0  # inside the slack
    with pytest.raises(InvalidArgument):
        lqsm_fidelity_lower(ghz, 2.0 + 1e-6)
    lonely = Mstate(SystemLayout((("A", 2),)), np.eye(2) / 2.0)
    with pytest.raises(LayoutMismatch):
        lqsm_fidelity_lower(lonely, 0.0)


def test_lqsm_fidelity_monotone_in_ci():
    ghz = preset("ghz")
    grid = np.linspace(0.0, 2.0, 21)
    vals = [lqsm_fidelity_lower(ghz, x) for x in grid]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_oneway_ci_upper_ghz():
    ghz = preset("ghz")
    pinned = oneway_ci_upper(ghz, discord_value=1.0)
    assert pinned == pytest.approx(2.0, abs=1e-9)
    searched = oneway_ci_upper(ghz, config=CFG)
    assert searched <= 2.0 + 1e-9
    assert searched >= 2.0 - 5e-3


def test_merge_conditional_entropy_check():
    ok = merge_conditional_entropy_check(preset("ghz"), "B", "C")
    assert ok.feasible
    assert abs(ok.conditional_entropy) <= 1e-9
    iso = Mstate(SystemLayout((("B", 2), ("C", 2))), np.eye(4) / 4.0)
    bad = merge_conditional_entropy_check(iso, "B", "C")
    assert not bad.feasible
    assert bad.conditional_entropy == pytest.approx(1.0, abs=1e-12)


def test_monotone_necessary_check():
    ok = monotone_necessary_check(preset("ghz"))
    assert ok.passes
    assert ok.helper_side == pytest.approx(1.0, abs=1e-9)
    bad = monotone_necessary_check(preset("product_eq10", (0.0,)))
    assert not bad.passes
    assert bad.helper_side <= 1e-9
    assert bad.reference_side == pytest.approx(1.0, abs=1e-9)


def test_family15_two_round_merge_reaches_the_bit():
    for c in (C_STAR, 0.3):
        outcome = family15_two_round_merge(c)
        assert outcome.achieved_mi == pytest.approx(1.0, abs=1e-9)
        assert outcome.rounds == 2
        assert len(outcome.transcript) == 3
        assert outcome.final_state.layout.parties == (("A", 2), ("C", 2), ("R", 2))


def test_family15_separation_report():
    report = family15_separation_report(C_STAR, CFG)
    assert report.receiver_pair_residual <= 1e-12
    assert report.helper_receiver_mi <= 1e-12
    assert report.total_mi == pytest.approx(1.0, abs=1e-9)
    assert report.helper_discord.value > 0.01
    assert report.oneway_upper <= 1.0 - 0.01
    assert report.two_round_mi == pytest.approx(1.0, abs=1e-9)
    assert report.gap > 0.01
    assert report.separated


def _cq_state():
    # classical bit on X pointing at nonorthogonal pure states of Y
    v0 = np.array([1.0, 0.0])
    vp = np.array([1.0, 1.0]) / math.sqrt(2.0)
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2] = 0.5 * np.outer(v0, v0)
    m[2:, 2:] = 0.5 * np.outer(vp, vp)
    return Mstate(SystemLayout((("X", 2), ("Y", 2))), m)


def test_discord_additivity_check_happy_path():
    check = discord_additivity_check(
        _cq_state(), "X", "Y", OptimizerConfig(restarts=4, max_iters=400, tol=1e-5, seed=23)
    )
    assert check.single.value > 0.1  # nonorthogonal branches leave real discord
    assert check.product_values[0] == pytest.approx(2.0 * check.single.value, abs=1e-9)
    assert len(check.product_values) == 5
    assert min(check.product_values) >= check.double.value - 1e-9
    assert check.double.value <= 2.0 * check.single.value + 1e-9
    assert abs(check.deviation) <= 2e-2
    assert check.single_classical == check.single.info["classical_correlation"]


def test_discord_additivity_check_rejections():
    wide = Mstate(SystemLayout((("X", 2), ("Y", 3))), np.eye(6) / 6.0)
    with pytest.raises(DimensionTooLarge):
        discord_additivity_check(wide, "X", "Y")
    with pytest.raises(ShapeMismatch):
        discord_additivity_check(preset("bell"), "A", "B")
    mixed_branch = np.diag([0.25, 0.25, 0.5, 0.0]).astype(complex)
    cq = Mstate(SystemLayout((("X", 2), ("Y", 2))), mixed_branch)
    with pytest.raises(ShapeMismatch):
        discord_additivity_check(cq, "X", "Y")


def test_dilated_protocol_state_recovers_flagged_state():
    ghz = preset("ghz").to_mstate()
    basis = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    povm = rank1_povm(basis, 2)
    dil = dilated_protocol_state(ghz, povm, "B")
    assert dil.layout.parties == (("A", 2), ("B", 2), ("C", 2), ("R", 2), ("E", 2))
    assert dil.purity() > 1.0 - 1e-12
    back = partial_trace(dil, ("B", "E"))
    flagged = flag_state(measure_ensemble(ghz, povm, "B"), "R")
    assert np.max(np.abs(back.matrix - flagged.matrix)) <= 1e-10


def test_dilated_protocol_state_four_outcomes():
    rho = random_mixed_state(SystemLayout((("A", 2), ("B", 2), ("C", 2))), 31, rank=2)
    povm = rank1_povm(haar_unitary(4, 33), 2)
    dil = dilated_protocol_state(rho, povm, "B")
    assert dil.layout.dim_of("B") == 4
    assert dil.layout.dim_of("R") == 4
    back = partial_trace(dil, ("B", "E"))
    flagged = flag_state(measure_ensemble(rho, povm, "B"), "R")
    assert np.max(np.abs(back.matrix - flagged.matrix)) <= 1e-10


def test_dilated_information_balance():
    ghz = preset("ghz").to_mstate()
    povm = rank1_povm(haar_unitary(4, 35), 2)
    dil = dilated_protocol_state(ghz, povm, "B")
    lhs = conditional_mutual_info(dil, "A", ("B", "E"), ("C", "R"))
    rhs = mutual_info(ghz, Partition("A", ("B", "C"))) - mutual_info(
        dil, Partition("A", ("C", "R"))
    )
    assert abs(lhs - rhs) <= 1e-9


def test_dilated_protocol_state_single_outcome():
    bell = preset("bell").to_mstate()
    dil = dilated_protocol_state(bell, Povm(2, (np.eye(2, dtype=complex),)), "B")
    assert dil.layout.parties == (("A", 2), ("B", 2), ("R", 2), ("E", 2))
    back = partial_trace(dil, ("R", "E"))
    assert np.max(np.abs(back.matrix - bell.matrix)) <= 1e-12


def test_dilated_protocol_state_errors():
    ghz = preset("ghz").to_mstate()
    halves = Povm(2, (np.eye(2) * 0.5, np.eye(2) * 0.5))
    with pytest.raises(NotRankOne):
        dilated_protocol_state(ghz, halves, "B")
    wide = rank1_povm(haar_unitary(3, 1), 3)
    with pytest.raises(LayoutMismatch):
        dilated_protocol_state(ghz, wide, "B")
    two = rank1_povm(np.eye(2, dtype=complex), 2)
    with pytest.raises(DuplicateParty):
        dilated_protocol_state(ghz, two, "B", register_label="A")
    with pytest.raises(DuplicateParty):
        dilated_protocol_state(ghz, two, "B", register_label="Q", env_label="Q")
