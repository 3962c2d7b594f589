"""Entropic quantities, distance measures, and the mutual-information
continuity bound. All entropies are in bits (log base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat
from .errors import InvalidArgument, InvalidPartition, LayoutMismatch, UnknownParty
from .states import Mstate, PureState, as_labels, partial_trace

_EIG_CLIP = 1e-12
_DIAG_TOL = 1e-13


@dataclass(frozen=True)
class Partition:
    """A bipartite cut: two disjoint groups of party labels."""

    left: tuple[str, ...]
    right: tuple[str, ...]

    def __init__(self, left, right):
        object.__setattr__(self, "left", as_labels(left))
        object.__setattr__(self, "right", as_labels(right))

    def validate(self, layout) -> None:
        for l in self.left + self.right:
            layout.index(l)  # raises UnknownParty
        overlap = set(self.left) & set(self.right)
        if overlap:
            raise InvalidPartition(f"cut sides overlap on {sorted(overlap)}")
        if not self.left or not self.right:
            raise InvalidPartition("both sides of a cut must be non-empty")


def spectrum_entropy(w) -> float:
    """Shannon entropy (bits) of a spectrum; values <= 1e-12 contribute 0."""
    w = np.clip(np.asarray(w, dtype=np.float64), 0.0, None)
    w = w[w > _EIG_CLIP]
    if w.size == 0:
        return 0.0
    return float(max(-(w * np.log2(w)).sum(), 0.0))


def matrix_entropy(m: np.ndarray) -> float:
    """Von Neumann entropy of a density matrix given as a raw array.

    Diagonal matrices (off-diagonal magnitude below 1e-13) skip the
    eigensolve; the result is identical up to that tolerance.
    """
    off = m - np.diag(np.diagonal(m))
    if np.max(np.abs(off)) < _DIAG_TOL:
        return spectrum_entropy(np.real(np.diagonal(m)))
    return spectrum_entropy(np.linalg.eigvalsh(m))


def vn_entropy(state: Mstate | PureState) -> float:
    """Von Neumann entropy in bits; 0 for a PureState."""
    if isinstance(state, PureState):
        return 0.0
    return matrix_entropy(state.matrix)


def _as_mstate(state) -> Mstate:
    return state.to_mstate() if isinstance(state, PureState) else state


def _group_entropy(rho: Mstate, labels) -> float:
    labels = as_labels(labels)
    drop = [l for l in rho.layout.labels if l not in labels]
    reduced = partial_trace(rho, drop) if drop else rho
    return matrix_entropy(reduced.matrix)


def mutual_info(state: Mstate | PureState, cut: Partition) -> float:
    """I(left : right) = S(left) + S(right) - S(left,right).

    Parties outside the cut are traced out first.
    """
    rho = _as_mstate(state)
    cut.validate(rho.layout)
    inside = set(cut.left) | set(cut.right)
    extra = [l for l in rho.layout.labels if l not in inside]
    if extra:
        rho = partial_trace(rho, extra)
    s_l = _group_entropy(rho, cut.left)
    s_r = _group_entropy(rho, cut.right)
    s_lr = matrix_entropy(rho.matrix)
    return s_l + s_r - s_lr


def conditional_entropy(state: Mstate | PureState, target, given=()) -> float:
    """S(target | given) = S(target, given) - S(given)."""
    rho = _as_mstate(state)
    t = as_labels(target)
    g = as_labels(given) if given else ()
    for l in t + g:
        rho.layout.index(l)
    if set(t) & set(g):
        raise InvalidPartition(f"target and given overlap on {sorted(set(t) & set(g))}")
    if not t:
        raise InvalidPartition("conditional_entropy: empty target")
    s_tg = _group_entropy(rho, t + g)
    s_g = _group_entropy(rho, g) if g else 0.0
    return s_tg - s_g


def conditional_mutual_info(state: Mstate | PureState, x, y, z=()) -> float:
    """I(x : y | z) = S(x,z) + S(y,z) - S(z) - S(x,y,z); z may be empty."""
    rho = _as_mstate(state)
    xs, ys = as_labels(x), as_labels(y)
    zs = as_labels(z) if z else ()
    groups = (xs, ys, zs)
    flat = xs + ys + zs
    for l in flat:
        rho.layout.index(l)
    for i in range(3):
        for j in range(i + 1, 3):
            overlap = set(groups[i]) & set(groups[j])
            if overlap:
                raise InvalidPartition(f"groups overlap on {sorted(overlap)}")
    if not xs or not ys:
        raise InvalidPartition("conditional_mutual_info: x and y must be non-empty")
    s_xz = _group_entropy(rho, xs + zs)
    s_yz = _group_entropy(rho, ys + zs)
    s_z = _group_entropy(rho, zs) if zs else 0.0
    s_xyz = _group_entropy(rho, flat)
    return s_xz + s_yz - s_z - s_xyz


def uhlmann_fidelity(a: Mstate | PureState, b: Mstate | PureState) -> float:
    """Fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1]."""
    ra, rb = _as_mstate(a), _as_mstate(b)
    if ra.layout.parties != rb.layout.parties:
        raise LayoutMismatch(
            f"fidelity: layouts differ ({ra.layout.describe()} vs {rb.layout.describe()})"
        )
    root = qmat.psd_sqrt(ra.matrix)
    inner = root @ rb.matrix @ root
    w = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(np.sqrt(w).sum(), 1.0))


def trace_distance(a: Mstate | PureState, b: Mstate | PureState) -> float:
    """Half the trace norm of the difference; in [0, 1]."""
    ra, rb = _as_mstate(a), _as_mstate(b)
    if ra.layout.parties != rb.layout.parties:
        raise LayoutMismatch(
            f"trace_distance: layouts differ ({ra.layout.describe()} vs {rb.layout.describe()})"
        )
    return float(min(0.5 * qmat.trace_norm(ra.matrix - rb.matrix), 1.0))


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x) on [0, 1]."""
    if not (0.0 <= x <= 1.0):
        raise InvalidArgument(f"binary_entropy: argument {x} outside [0, 1]")
    out = 0.0
    if x > 0.0:
        out -= x * math.log2(x)
    if x < 1.0:
        out -= (1.0 - x) * math.log2(1.0 - x)
    return out


def mi_continuity_bound(t: float, total_dim: int) -> float:
    """Bound on |I(rho) - I(sigma)| given trace distance t and total dimension.

    Value is 3 t log2(d) + 3 h(t). The derivation behind it assumes
    t <= 1/2; callers should flag larger t (the CLI does).
    """
    if not (0.0 <= t <= 1.0):
        raise InvalidArgument(f"mi_continuity_bound: trace distance {t} outside [0, 1]")
    if total_dim < 2:
        raise InvalidArgument(f"mi_continuity_bound: total_dim must be >= 2, got {total_dim}")
    return 3.0 * t * math.log2(total_dim) + 3.0 * binary_entropy(t)
