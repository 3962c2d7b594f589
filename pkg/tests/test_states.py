import json
import math

import numpy as np
import pytest

from ci_toolkit.errors import (
    DimensionTooLarge,
    DuplicateParty,
    InvalidArgument,
    InvalidMatrix,
    InvalidPreset,
    NotPSD,
    StateFileError,
    UnknownParty,
)
from ci_toolkit.states import (
    Ensemble,
    Mstate,
    PureState,
    SystemLayout,
    dimension_cap,
    family15_bob_states,
    load_state_file,
    merge_parties,
    partial_trace,
    partial_transpose,
    permute_parties,
    preset,
    purify,
    random_mixed_state,
    random_pure_state,
    state_from_dict,
    tensor,
)

THREE = SystemLayout((("A", 2), ("B", 2), ("C", 2)))
TWO = SystemLayout((("A", 2), ("B", 2)))


def _bell():
    v = np.zeros(4)
    v[0] = v[3] = 1 / math.sqrt(2)
    return Mstate(TWO, np.outer(v, v))


# --- layouts ---------------------------------------------------------------


def test_layout_accessors():
    lay = SystemLayout((("A", 2), ("B", 3)))
    assert lay.labels == ("A", "B")
    assert lay.dims == (2, 3)
    assert lay.total_dim == 6
    assert lay.index("B") == 1
    assert lay.dim_of("B") == 3
    assert lay.group_dim(("A", "B")) == 6
    assert lay.describe() == "A:2,B:3"


def test_layout_rejects_duplicates_and_small_dims():
    with pytest.raises(DuplicateParty):
        SystemLayout((("A", 2), ("A", 2)))
    with pytest.raises(InvalidArgument):
        SystemLayout((("A", 1),))


def test_layout_unknown_party():
    with pytest.raises(UnknownParty):
        THREE.index("Q")


def test_dimension_cap_env_override(monkeypatch):
    monkeypatch.delenv("CI_TOOLKIT_DIM_CAP", raising=False)
    assert dimension_cap() == 64
    monkeypatch.setenv("CI_TOOLKIT_DIM_CAP", "16")
    assert dimension_cap() == 16
    monkeypatch.setenv("CI_TOOLKIT_DIM_CAP", "nope")
    with pytest.raises(InvalidArgument):
        dimension_cap()
    monkeypatch.setenv("CI_TOOLKIT_DIM_CAP", "1")
    with pytest.raises(InvalidArgument):
        dimension_cap()


# --- state containers -------------------------------------------------------


def test_mstate_validation():
    with pytest.raises(InvalidMatrix):
        Mstate(TWO, np.eye(3) / 3.0)
    nh = np.eye(4) / 4.0
    nh = nh.astype(complex)
    nh[0, 1] = 0.1
    with pytest.raises(InvalidMatrix):
        Mstate(TWO, nh)
    with pytest.raises(InvalidMatrix):
        Mstate(TWO, np.eye(4) / 2.0)
    with pytest.raises(NotPSD):
        Mstate(TWO, np.diag([0.75, 0.75, -0.25, -0.25]))


def test_mstate_matrix_is_frozen():
    rho = _bell()
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0.0


def test_purity():
    assert np.isclose(_bell().purity(), 1.0)
    iso = Mstate(TWO, np.eye(4) / 4.0)
    assert np.isclose(iso.purity(), 0.25)


def test_pure_state_validation_and_to_mstate():
    with pytest.raises(InvalidMatrix):
        PureState(TWO, np.array([1.0, 0.0, 0.0]))
    with pytest.raises(InvalidMatrix):
        PureState(TWO, np.array([1.0, 1.0, 0.0, 0.0]))
    v = np.zeros(4)
    v[0] = v[3] = 1 / math.sqrt(2)
    psi = PureState(TWO, v)
    assert np.max(np.abs(psi.to_mstate().matrix - _bell().matrix)) <= 1e-14


def test_ensemble_validation_and_average():
    psi0 = PureState(TWO, [1, 0, 0, 0])
    psi3 = PureState(TWO, [0, 0, 0, 1])
    ens = Ensemble((0.5, 0.5), (psi0, psi3))
    avg = ens.average()
    assert np.allclose(np.diag(avg.matrix).real, [0.5, 0, 0, 0.5])
    with pytest.raises(InvalidArgument):
        Ensemble((0.7, 0.7), (psi0, psi3))
    with pytest.raises(InvalidArgument):
        Ensemble((1.0,), (psi0, psi3))
    with pytest.raises(InvalidArgument):
        Ensemble((), ())
    other = PureState(SystemLayout((("X", 4),)), [1, 0, 0, 0])
    with pytest.raises(InvalidArgument):
        Ensemble((0.5, 0.5), (psi0, other))


# --- structural operations --------------------------------------------------


def test_tensor_appends_and_rejects_clashes():
    q = Mstate(SystemLayout((("C", 2),)), np.diag([1.0, 0.0]))
    out = tensor(_bell(), q)
    assert out.layout.labels == ("A", "B", "C")
    assert np.isclose(out.matrix[0, 0].real, 0.5)
    with pytest.raises(DuplicateParty):
        tensor(_bell(), Mstate(SystemLayout((("A", 2),)), np.eye(2) / 2.0))


def test_partial_trace_bell_marginal():
    red = partial_trace(_bell(), "B")
    assert red.layout.labels == ("A",)
    assert np.allclose(red.matrix, np.eye(2) / 2.0)


def test_partial_trace_keeps_order():
    ghz = preset("ghz").to_mstate()
    red = partial_trace(ghz, "B")
    assert red.layout.labels == ("A", "C")
    # GHZ with B removed is classically correlated across A:C
    assert np.allclose(np.diag(red.matrix).real, [0.5, 0, 0, 0.5])


def test_partial_trace_errors():
    with pytest.raises(UnknownParty):
        partial_trace(_bell(), "Q")
    with pytest.raises(InvalidArgument):
        partial_trace(_bell(), ())
    with pytest.raises(InvalidArgument):
        partial_trace(_bell(), ("A", "B"))
    with pytest.raises(InvalidArgument):
        partial_trace(_bell(), ("A", "A"))


def test_partial_transpose_bell_has_negative_eigenvalue():
    pt = partial_transpose(_bell(), "A")
    assert isinstance(pt, np.ndarray)
    w = np.linalg.eigvalsh(pt)
    assert np.isclose(w[0], -0.5, atol=1e-12)
    # transposing both subsystems is a full transpose
    both = partial_transpose(_bell(), ("A", "B"))
    assert np.allclose(both, _bell().matrix.T)


def test_permute_parties_round_trip():
    psi = random_pure_state(THREE, 5)
    fwd = permute_parties(psi, ("C", "A", "B"))
    assert fwd.layout.labels == ("C", "A", "B")
    back = permute_parties(fwd, ("A", "B", "C"))
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) <= 1e-15

    rho = random_mixed_state(THREE, 6)
    fwd = permute_parties(rho, ("B", "C", "A"))
    back = permute_parties(fwd, ("A", "B", "C"))
    assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-15


def test_permute_parties_rejects_non_permutation():
    with pytest.raises(InvalidArgument):
        permute_parties(_bell(), ("A",))


def test_merge_parties_flat_index_unchanged():
    ghz = preset("ghz")
    merged = merge_parties(ghz, ("A", "B"), "AB")
    assert merged.layout.parties == (("AB", 4), ("C", 2))
    assert np.array_equal(merged.amplitudes, ghz.amplitudes)
    with pytest.raises(InvalidArgument):
        merge_parties(ghz, ("A", "C"), "AC")
    with pytest.raises(DuplicateParty):
        merge_parties(ghz, ("A", "B"), "C")


def test_purify_round_trip():
    rho = random_mixed_state(TWO, 9)
    psi = purify(rho, "Z")
    assert psi.layout.labels == ("A", "B", "Z")
    back = partial_trace(psi.to_mstate(), "Z")
    assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-10


def test_purify_rank_deficient_uses_small_ancilla():
    rho = random_mixed_state(TWO, 10, rank=2)
    psi = purify(rho, "Z")
    assert psi.layout.dim_of("Z") == 2
    back = partial_trace(psi.to_mstate(), "Z")
    assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-10


def test_purify_pure_input_appends_vacuum():
    psi = purify(_bell(), "Z")
    assert psi.layout.dim_of("Z") == 2
    amps = psi.amplitudes
    # input (x) |0> up to a global phase
    assert np.allclose(np.abs(amps[[0, 6]]), 1 / math.sqrt(2))
    assert np.allclose(np.delete(amps, [0, 6]), 0.0)
    assert np.isclose(amps[0] * np.conj(amps[6]), 0.5)


def test_purify_rejects_existing_label():
    with pytest.raises(DuplicateParty):
        purify(_bell(), "A")


# --- presets -----------------------------------------------------------------


def test_preset_ghz_w_bell():
    ghz = preset("ghz")
    assert np.allclose(ghz.amplitudes[[0, 7]], 1 / math.sqrt(2))
    w = preset("w")
    assert np.allclose(w.amplitudes[[1, 2, 4]], 1 / math.sqrt(3))
    bell = preset("bell")
    assert bell.layout.labels == ("A", "B")
    with pytest.raises(InvalidPreset):
        preset("ghz", (0.5,))
    with pytest.raises(InvalidPreset):
        preset("nope")


def test_family15_bob_states_are_orthonormal_pairs():
    for c in (0.3, math.cos(math.pi / 8)):
        b = family15_bob_states(c)
        assert np.isclose(np.vdot(b[2], b[2]).real, 1.0)
        assert abs(np.vdot(b[2], b[3])) <= 1e-15
        assert np.isclose(abs(np.vdot(b[0], b[2])), c)


def test_preset_family15_structure():
    c = 0.6
    rho = preset("family15", (c,))
    assert rho.layout.describe() == "A:2,B:2,C:2"
    # equal-weight classical flags on A and C
    red = partial_trace(rho, "B")
    assert np.allclose(np.diag(red.matrix).real, 0.25)
    assert np.isclose(np.trace(rho.matrix).real, 1.0)
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(InvalidPreset):
            preset("family15", (bad,))
    with pytest.raises(InvalidPreset):
        preset("family15")


def test_preset_product_eq10():
    rho = preset("product_eq10")
    assert rho.layout.labels == ("A", "B1", "B2", "C")
    half = preset("product_eq10", (0.5,))
    right = partial_trace(half, ("A", "B1"))
    # spectrum of 0.5*bell + 0.5*identity/4 is (0.625, 0.125, 0.125, 0.125)
    assert np.isclose(right.purity(), 0.625 ** 2 + 3 * 0.125 ** 2, atol=1e-12)
    left = partial_trace(half, ("B2", "C"))
    assert np.isclose(left.purity(), 1.0, atol=1e-12)
    with pytest.raises(InvalidPreset):
        preset("product_eq10", (1.5,))


def test_preset_classical_classical():
    rho = preset("classical_classical")
    assert np.allclose(np.diag(rho.matrix).real, [0.5, 0, 0, 0.5])
    skew = preset("classical_classical", (0.1, 0.2, 0.3, 0.4))
    assert np.allclose(np.diag(skew.matrix).real, [0.1, 0.2, 0.3, 0.4])
    with pytest.raises(InvalidPreset):
        preset("classical_classical", (0.5, 0.5))
    with pytest.raises(InvalidPreset):
        preset("classical_classical", (0.9, 0.9, -0.4, -0.4))


def test_preset_max_correlated():
    params = (0.5, 0.0, 0.25, 0.0, 0.25, 0.0, 0.5, 0.0)
    rho = preset("max_correlated", params)
    assert rho.layout.parties == (("X", 2), ("Z", 2))
    m = rho.matrix
    assert np.isclose(m[0, 3].real, 0.25)
    assert np.isclose(m[1, 1].real, 0.0)
    with pytest.raises(InvalidPreset):
        preset("max_correlated")
    with pytest.raises(InvalidPreset):
        preset("max_correlated", (0.5, 0.0, 0.5))  # odd count
    with pytest.raises(InvalidPreset):
        preset("max_correlated", (1.0, 0.0, 0.0, 0.0, 0.0, 0.0))  # not square
    # non-hermitian coefficients
    with pytest.raises(InvalidPreset):
        preset("max_correlated", (0.5, 0.0, 0.25, 0.1, 0.25, 0.1, 0.5, 0.0))


def test_preset_respects_dimension_cap(monkeypatch):
    monkeypatch.setenv("CI_TOOLKIT_DIM_CAP", "4")
    with pytest.raises(DimensionTooLarge):
        preset("ghz")
    preset("bell")  # dim 4 still fits


# --- random states -----------------------------------------------------------


def test_random_states_are_seed_deterministic():
    a = random_pure_state(THREE, 42)
    b = random_pure_state(THREE, 42)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    c = random_pure_state(THREE, 43)
    assert not np.allclose(a.amplitudes, c.amplitudes)

    m1 = random_mixed_state(TWO, 42)
    m2 = random_mixed_state(TWO, 42)
    assert np.array_equal(m1.matrix, m2.matrix)


def test_random_mixed_state_rank():
    rho = random_mixed_state(TWO, 3, rank=2)
    w = np.linalg.eigvalsh(rho.matrix)
    assert np.sum(w > 1e-12) == 2
    with pytest.raises(InvalidArgument):
        random_mixed_state(TWO, 3, rank=0)
    with pytest.raises(InvalidArgument):
        random_mixed_state(TWO, 3, rank=5)


def test_random_states_accept_label_dim_pairs():
    psi = random_pure_state((("X", 2), ("Y", 3)), 1)
    assert psi.layout.total_dim == 6


# --- state files ---------------------------------------------------------------


def _bell_matrix_doc():
    pairs = [[0.0, 0.0]] * 16
    for i in (0, 3, 12, 15):
        pairs[i] = [0.5, 0.0]
    return {
        "parties": [{"label": "A", "dim": 2}, {"label": "B", "dim": 2}],
        "matrix": pairs,
    }


def test_state_from_dict_matrix():
    rho = state_from_dict(_bell_matrix_doc())
    assert np.max(np.abs(rho.matrix - _bell().matrix)) <= 1e-12


def test_state_from_dict_ensemble():
    doc = {
        "parties": [{"label": "A", "dim": 2}, {"label": "B", "dim": 2}],
        "ensemble": {
            "weights": [0.5, 0.5],
            "vectors": [
                [[1, 0], [0, 0], [0, 0], [0, 0]],
                [[0, 0], [0, 0], [0, 0], [1, 0]],
            ],
        },
    }
    rho = state_from_dict(doc)
    assert np.allclose(np.diag(rho.matrix).real, [0.5, 0, 0, 0.5])


def test_state_from_dict_ensemble_normalizes_vectors():
    doc = {
        "parties": [{"label": "A", "dim": 2}],
        "ensemble": {"weights": [1.0], "vectors": [[[2, 0], [0, 0]]]},
    }
    rho = state_from_dict(doc)
    assert np.isclose(rho.matrix[0, 0].real, 1.0)


def test_state_from_dict_preset_with_relabel():
    doc = {
        "preset": {"name": "bell"},
        "parties": [{"label": "L", "dim": 2}, {"label": "M", "dim": 2}],
    }
    psi = state_from_dict(doc)
    assert psi.layout.labels == ("L", "M")


def test_state_from_dict_error_messages_name_the_field():
    with pytest.raises(StateFileError, match="parties"):
        state_from_dict({"matrix": []})
    with pytest.raises(StateFileError, match=r"parties\[0\].dim"):
        state_from_dict({"parties": [{"label": "A", "dim": 1}], "matrix": []})
    with pytest.raises(StateFileError, match="exactly one"):
        state_from_dict({"parties": [{"label": "A", "dim": 2}]})
    with pytest.raises(StateFileError, match="exactly one"):
        state_from_dict(
            {"parties": [{"label": "A", "dim": 2}], "matrix": [], "preset": {"name": "bell"}}
        )
    doc = _bell_matrix_doc()
    doc["matrix"] = doc["matrix"][:7]
    with pytest.raises(StateFileError, match="16"):
        state_from_dict(doc)
    doc = _bell_matrix_doc()
    doc["matrix"][2] = [0.1]
    with pytest.raises(StateFileError, match=r"matrix\[2\]"):
        state_from_dict(doc)
    with pytest.raises(StateFileError, match="preset"):
        state_from_dict({"preset": {"name": "nope"}})
    bad_ens = {
        "parties": [{"label": "A", "dim": 2}],
        "ensemble": {"weights": [0.4, 0.4], "vectors": [[[1, 0], [0, 0]]]},
    }
    with pytest.raises(StateFileError, match="vectors"):
        state_from_dict(bad_ens)


def test_state_from_dict_rejects_non_physical_matrix():
    doc = _bell_matrix_doc()
    doc["matrix"][1] = [0.3, 0.0]  # breaks hermiticity
    with pytest.raises(StateFileError, match="matrix"):
        state_from_dict(doc)


def test_state_from_dict_dimension_cap(monkeypatch):
    monkeypatch.setenv("CI_TOOLKIT_DIM_CAP", "2")
    doc = _bell_matrix_doc()
    with pytest.raises(DimensionTooLarge):
        state_from_dict(doc)


def test_load_state_file(tmp_path):
    path = tmp_path / "bell.json"
    path.write_text(json.dumps(_bell_matrix_doc()))
    rho = load_state_file(path)
    assert rho.layout.labels == ("A", "B")

    with pytest.raises(StateFileError, match="cannot read"):
        load_state_file(tmp_path / "missing.json")

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(StateFileError, match="not valid JSON"):
        load_state_file(bad)
