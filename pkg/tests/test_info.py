import math

import numpy as np
import pytest

from ci_toolkit.errors import (
    InvalidArgument,
    InvalidPartition,
    LayoutMismatch,
    UnknownParty,
)
from ci_toolkit.info import (
    Partition,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_info,
    matrix_entropy,
    mi_continuity_bound,
    mutual_info,
    spectrum_entropy,
    trace_distance,
    uhlmann_fidelity,
    vn_entropy,
)
from ci_toolkit.states import (
    Mstate,
    PureState,
    SystemLayout,
    preset,
    random_mixed_state,
)

THREE = SystemLayout((("A", 2), ("B", 2), ("C", 2)))
ONE = SystemLayout((("Q", 2),))


def test_spectrum_entropy_uniform():
    for n in (2, 4, 8):
        assert np.isclose(spectrum_entropy(np.full(n, 1.0 / n)), math.log2(n))


def test_spectrum_entropy_clips_tiny_and_negative():
    assert spectrum_entropy([1.0 - 1e-13, 1e-13]) <= 1e-10
    assert spectrum_entropy([-0.1, 1.1]) == 0.0
    assert spectrum_entropy([]) == 0.0


def test_matrix_entropy_diagonal_fast_path_matches_eigen():
    p = np.array([0.4, 0.3, 0.2, 0.1])
    diag = np.diag(p.astype(complex))
    assert np.isclose(matrix_entropy(diag), spectrum_entropy(p), atol=1e-14)
    # rotate so the fast path cannot trigger; entropy is basis-independent
    rng = np.random.default_rng(3)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, _ = np.linalg.qr(g)
    rotated = q @ diag @ q.conj().T
    assert np.isclose(matrix_entropy(rotated), spectrum_entropy(p), atol=1e-10)


def test_vn_entropy_pure_state_is_zero():
    assert vn_entropy(preset("ghz")) == 0.0
    iso = Mstate(ONE, np.eye(2) / 2.0)
    assert np.isclose(vn_entropy(iso), 1.0)


def test_partition_validation():
    with pytest.raises(InvalidPartition):
        Partition("A", "A").validate(THREE)
    with pytest.raises(InvalidPartition):
        Partition((), "A").validate(THREE)
    with pytest.raises(UnknownParty):
        Partition("A", "Q").validate(THREE)


def test_mutual_info_bell_and_product():
    bell = preset("bell")
    assert np.isclose(mutual_info(bell, Partition("A", "B")), 2.0, atol=1e-12)
    prod = Mstate(
        SystemLayout((("A", 2), ("B", 2))), np.kron(np.eye(2), np.eye(2)) / 4.0
    )
    assert abs(mutual_info(prod, Partition("A", "B"))) <= 1e-12


def test_mutual_info_traces_out_extra_parties():
    ghz = preset("ghz")
    # with C discarded, A and B share one classical bit
    assert np.isclose(mutual_info(ghz, Partition("A", "B")), 1.0, atol=1e-12)


def test_conditional_entropy():
    bell = preset("bell")
    assert np.isclose(conditional_entropy(bell, "A", "B"), -1.0, atol=1e-12)
    cc = preset("classical_classical")
    assert abs(conditional_entropy(cc, "A", "B")) <= 1e-12
    assert np.isclose(conditional_entropy(cc, "A"), 1.0, atol=1e-12)
    with pytest.raises(InvalidPartition):
        conditional_entropy(bell, "A", "A")


def test_conditional_mutual_info_chain_rule():
    for k in range(10):
        rho = random_mixed_state(THREE, 300 + k)
        total = mutual_info(rho, Partition("A", ("B", "C")))
        chained = mutual_info(rho, Partition("A", "C")) + conditional_mutual_info(
            rho, "A", "B", "C"
        )
        assert abs(total - chained) <= 1e-9


def test_conditional_mutual_info_strong_subadditivity():
    for k in range(20):
        rho = random_mixed_state(THREE, 400 + k)
        assert conditional_mutual_info(rho, "A", "B", "C") >= -1e-9


def test_conditional_mutual_info_empty_conditioner():
    bell = preset("bell")
    i_ab = mutual_info(bell, Partition("A", "B"))
    assert np.isclose(conditional_mutual_info(bell, "A", "B"), i_ab, atol=1e-12)
    with pytest.raises(InvalidPartition):
        conditional_mutual_info(bell, "A", "A")


def test_uhlmann_fidelity():
    zero = Mstate(ONE, np.diag([1.0, 0.0]))
    one = Mstate(ONE, np.diag([0.0, 1.0]))
    plus = Mstate(ONE, np.full((2, 2), 0.5))
    assert np.isclose(uhlmann_fidelity(zero, zero), 1.0, atol=1e-12)
    assert uhlmann_fidelity(zero, one) <= 1e-12
    assert np.isclose(uhlmann_fidelity(zero, plus), 1 / math.sqrt(2), atol=1e-12)
    other = Mstate(SystemLayout((("P", 2),)), np.diag([1.0, 0.0]))
    with pytest.raises(LayoutMismatch):
        uhlmann_fidelity(zero, other)


def test_trace_distance():
    bell = preset("bell").to_mstate()
    iso = Mstate(bell.layout, np.eye(4) / 4.0)
    assert np.isclose(trace_distance(bell, iso), 0.75, atol=1e-12)
    assert trace_distance(bell, bell) <= 1e-12
    other = Mstate(SystemLayout((("X", 2), ("Y", 2))), np.eye(4) / 4.0)
    with pytest.raises(LayoutMismatch):
        trace_distance(bell, other)


def test_trace_distance_accepts_pure_states():
    assert trace_distance(preset("ghz"), preset("ghz")) <= 1e-12
    d = trace_distance(preset("ghz"), preset("w"))
    assert 0.0 < d <= 1.0


def test_binary_entropy():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert np.isclose(binary_entropy(0.5), 1.0)
    assert np.isclose(binary_entropy(0.25), binary_entropy(0.75), atol=1e-14)
    for bad in (-0.1, 1.1):
        with pytest.raises(InvalidArgument):
            binary_entropy(bad)


def test_mi_continuity_bound_formula():
    assert mi_continuity_bound(0.0, 4) == 0.0
    expected = 3 * 0.25 * 2 + 3 * binary_entropy(0.25)
    assert np.isclose(mi_continuity_bound(0.25, 4), expected, atol=1e-14)
    with pytest.raises(InvalidArgument):
        mi_continuity_bound(-0.1, 4)
    with pytest.raises(InvalidArgument):
        mi_continuity_bound(1.5, 4)
    with pytest.raises(InvalidArgument):
        mi_continuity_bound(0.1, 1)
