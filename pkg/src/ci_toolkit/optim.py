"""Derivative-free optimization over unitaries and rank-1 POVMs.

A dim x dim unitary is parameterized by dim^2 real angles: dim column
phases followed by (theta, phi) for every index pair (j < k) in
lexicographic order, each pair contributing one two-level rotation. The
product

    U = G(0,1) G(0,2) ... G(n-2,n-1) D(phases)

covers the whole unitary group (the factorization is constructive, see
`encode_unitary`), and `decode_unitary` returns an exactly unitary matrix
for arbitrary real angles.

`maximize` runs a compass pattern search over the angles: every iteration
polls all coordinates at +/- step around the base point, moves to the best
candidate that clears a sufficient-decrease margin, and halves the step
when none does.
Restarts are seeded Haar unitaries, reduced deterministically (strict
improvement keeps the lowest restart index). With a vectorized objective
all restarts advance in lockstep — each follows its own trajectory, but
every iteration's polls are pooled into batched objective calls — and the
index-ordered reduction keeps the result equivalent to running them one at
a time. The search is deterministic for a fixed seed and config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NotPSD, ObjectiveError

_UNITARY_TOL = 1e-9


def rotation_pairs(dim: int) -> list[tuple[int, int]]:
    return [(j, k) for j in range(dim) for k in range(j + 1, dim)]


def angle_count(dim: int) -> int:
    return dim * dim


@dataclass(frozen=True)
class UnitaryParam:
    """Angle vector (length dim^2) naming one unitary via the fixed product."""

    dim: int
    angles: np.ndarray

    def __post_init__(self):
        d = int(self.dim)
        if d < 1:
            raise InvalidArgument(f"UnitaryParam: dim must be >= 1, got {d}")
        a = np.asarray(self.angles, dtype=np.float64).reshape(-1)
        if a.shape != (d * d,):
            raise InvalidArgument(
                f"UnitaryParam: expected {d * d} angles for dim {d}, got {a.shape[0]}"
            )
        a = np.array(a, copy=True)
        a.setflags(write=False)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "angles", a)


@dataclass(frozen=True)
class OptimizerConfig:
    """Pattern-search configuration; defaults are the package-wide defaults."""

    restarts: int = 32
    max_iters: int = 2000
    initial_step: float = 0.5
    shrink_factor: float = 0.5
    tol: float = 1e-6
    seed: int = 7
    povm_outcomes: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidArgument("OptimizerConfig: restarts must be >= 1")
        if self.max_iters < 1:
            raise InvalidArgument("OptimizerConfig: max_iters must be >= 1")
        if not (self.initial_step > 0.0):
            raise InvalidArgument("OptimizerConfig: initial_step must be positive")
        if not (0.0 < self.shrink_factor < 1.0):
            raise InvalidArgument("OptimizerConfig: shrink_factor must lie in (0, 1)")
        if not (self.tol > 0.0):
            raise InvalidArgument("OptimizerConfig: tol must be positive")
        if self.povm_outcomes is not None and self.povm_outcomes < 1:
            raise InvalidArgument("OptimizerConfig: povm_outcomes must be >= 1")


def _split_angles(dim: int, angles: np.ndarray):
    return angles[:dim], angles[dim::2], angles[dim + 1 :: 2]


def _decode_columns(dim: int, angles: np.ndarray, cols: int) -> np.ndarray:
    phases, th, ph = _split_angles(dim, angles)
    u = np.zeros((dim, cols), dtype=np.complex128)
    for l in range(min(dim, cols)):
        u[l, l] = np.exp(1j * phases[l])
    pairs = rotation_pairs(dim)
    for r in range(len(pairs) - 1, -1, -1):
        j, k = pairs[r]
        c, s, e = math.cos(th[r]), math.sin(th[r]), np.exp(1j * ph[r])
        rj = u[j].copy()
        u[j] = c * rj - e * s * u[k]
        u[k] = np.conj(e) * s * rj + c * u[k]
    return u


def decode_unitary(param: UnitaryParam, columns: int | None = None) -> np.ndarray:
    """Decode angles to a unitary (or its first `columns` columns).

    The result is unitary to machine precision for every angle vector.
    """
    cols = param.dim if columns is None else int(columns)
    if not (1 <= cols <= param.dim):
        raise InvalidArgument(f"decode_unitary: columns must be in [1, {param.dim}]")
    return _decode_columns(param.dim, np.asarray(param.angles, dtype=np.float64), cols)


def encode_unitary(u) -> UnitaryParam:
    """Exact angle factorization of a unitary (decode inverts it to 1e-12)."""
    m = np.asarray(u, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgument(f"encode_unitary: expected a square matrix, got {m.shape}")
    n = m.shape[0]
    dev = np.max(np.abs(m.conj().T @ m - np.eye(n)))
    if dev > _UNITARY_TOL:
        raise InvalidArgument(f"encode_unitary: matrix is not unitary (deviation {dev:.3e})")
    work = m.copy()
    pairs = rotation_pairs(n)
    thetas = np.zeros(len(pairs))
    phis = np.zeros(len(pairs))
    for r, (j, k) in enumerate(pairs):
        a, b = work[j, j], work[k, j]
        theta = math.atan2(abs(b), abs(a))
        phi = float(np.angle(a) - np.angle(b)) if abs(b) > 1e-300 else 0.0
        c, s, e = math.cos(theta), math.sin(theta), np.exp(1j * phi)
        rj = work[j].copy()
        work[j] = c * rj + e * s * work[k]
        work[k] = -np.conj(e) * s * rj + c * work[k]
        thetas[r], phis[r] = theta, phi
    phases = np.angle(np.diagonal(work))
    angles = np.empty(n * n)
    angles[:n] = phases
    angles[n::2] = thetas
    angles[n + 1 :: 2] = phis
    return UnitaryParam(n, angles)


def haar_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-random unitary: QR of a complex Gaussian with phase-fixed R."""
    if dim < 1:
        raise InvalidArgument(f"haar_unitary: dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def complete_isometry(v) -> np.ndarray:
    """Extend a K x d isometry (orthonormal columns) to a K x K unitary whose
    first d columns equal it exactly."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2 or v.shape[1] > v.shape[0]:
        raise InvalidArgument(f"complete_isometry: bad shape {v.shape}")
    k, d = v.shape
    dev = np.max(np.abs(v.conj().T @ v - np.eye(d)))
    if dev > _UNITARY_TOL:
        raise InvalidArgument(f"complete_isometry: columns not orthonormal ({dev:.3e})")
    q, _ = np.linalg.qr(v, mode="complete")
    u = np.array(q)
    u[:, :d] = v  # replace the QR phase convention by the exact input
    if d < k:
        # re-orthogonalize the completion against the replaced block
        tail = u[:, d:] - v @ (v.conj().T @ u[:, d:])
        tq, _ = np.linalg.qr(tail)
        u[:, d:] = tq
    return u


@dataclass(frozen=True)
class Povm:
    """Measurement with PSD elements summing to the identity on one party."""

    party_dim: int
    elements: tuple
    vectors: np.ndarray | None = None

    def __post_init__(self):
        d = int(self.party_dim)
        if d < 1:
            raise InvalidArgument("Povm: party_dim must be >= 1")
        elems = tuple(np.asarray(e, dtype=np.complex128) for e in self.elements)
        if not elems:
            raise InvalidArgument("Povm: needs at least one element")
        total = np.zeros((d, d), dtype=np.complex128)
        for i, e in enumerate(elems):
            if e.shape != (d, d):
                raise InvalidArgument(f"Povm: element {i} has shape {e.shape}, expected {(d, d)}")
            if np.max(np.abs(e - e.conj().T)) > 1e-9:
                raise InvalidArgument(f"Povm: element {i} is not Hermitian")
            if np.linalg.eigvalsh(e)[0] < -1e-10:
                raise NotPSD(f"Povm: element {i} has a negative eigenvalue")
            total += e
        if np.max(np.abs(total - np.eye(d))) > 1e-9:
            raise InvalidArgument("Povm: elements do not sum to the identity within 1e-9")
        object.__setattr__(self, "party_dim", d)
        object.__setattr__(self, "elements", elems)
        if self.vectors is not None:
            vec = np.asarray(self.vectors, dtype=np.complex128)
            object.__setattr__(self, "vectors", vec)

    def __len__(self) -> int:
        return len(self.elements)


def rank1_povm(u, party_dim: int) -> Povm:
    """Rank-1 POVM from a K x K unitary: element i projects onto the i-th row
    of the first `party_dim` columns. K outcomes on a dim-`party_dim` party."""
    m = np.asarray(u, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgument(f"rank1_povm: expected a square unitary, got {m.shape}")
    k = m.shape[0]
    if not (1 <= party_dim <= k):
        raise InvalidArgument(f"rank1_povm: party_dim {party_dim} must be in [1, {k}]")
    v = m[:, :party_dim]
    elements = tuple(np.outer(v[i], v[i].conj()) for i in range(k))
    return Povm(party_dim, elements, vectors=v)


# ---------------------------------------------------------------------------
# pattern search


class _ScalarEngine:
    """Reference evaluation path: one objective call per candidate."""

    def __init__(self, objective, dim: int):
        self.objective = objective
        self.dim = dim
        self.n_angles = angle_count(dim)

    def value(self, angles: np.ndarray) -> float:
        param = UnitaryParam(self.dim, angles)
        v = float(self.objective(param))
        if not np.isfinite(v):
            raise ObjectiveError(f"objective returned non-finite value {v}", param=param)
        return v

    def poll(self, angles: np.ndarray, step: float) -> np.ndarray:
        out = np.empty(2 * self.n_angles)
        for q in range(self.n_angles):
            for s, delta in enumerate((step, -step)):
                cand = angles.copy()
                cand[q] += delta
                out[2 * q + s] = self.value(cand)
        return out

    @staticmethod
    def candidate_delta(idx: int, step: float) -> tuple[int, float]:
        return idx // 2, step if idx % 2 == 0 else -step


class _BatchEngine:
    """Fast path: candidates for the polls of every live restart are
    assembled as rank-2 updates of each base isometry and evaluated in a
    handful of vectorized objective calls."""

    # outcome rows per objective call, keeping scratch arrays inside typical
    # objectives to tens of megabytes
    _ROW_BUDGET = 65536

    def __init__(self, batch_objective, dim: int, cols: int):
        self.f = batch_objective
        self.n = dim
        self.cols = cols
        self.pairs = np.array(rotation_pairs(dim), dtype=np.intp).reshape(-1, 2)
        self.m = len(self.pairs)

    def _eval(self, blocks: np.ndarray) -> np.ndarray:
        total = blocks.shape[0]
        per = max(1, self._ROW_BUDGET // self.n)
        if total <= per:
            vals = np.asarray(self.f(blocks), dtype=np.float64).reshape(-1)
        else:
            vals = np.concatenate(
                [
                    np.asarray(self.f(blocks[i : i + per]), dtype=np.float64).reshape(-1)
                    for i in range(0, total, per)
                ]
            )
        if vals.shape[0] != total:
            raise ObjectiveError(
                f"batch objective returned {vals.shape[0]} values for {total} candidates"
            )
        if not np.all(np.isfinite(vals)):
            raise ObjectiveError("batch objective returned a non-finite value")
        return vals

    def value(self, angles: np.ndarray) -> float:
        v = self.f(_decode_columns(self.n, angles, self.cols)[None, :, :])
        v = float(np.asarray(v).reshape(-1)[0])
        if not np.isfinite(v):
            raise ObjectiveError(
                f"objective returned non-finite value {v}",
                param=UnitaryParam(self.n, angles),
            )
        return v

    def values(self, angles_stack: np.ndarray) -> np.ndarray:
        blocks = np.stack(
            [_decode_columns(self.n, a, self.cols) for a in angles_stack]
        )
        return self._eval(blocks)

    def _chains(self, angles: np.ndarray):
        """Running products of the rotation chain for a stack of angle
        vectors, gathered down to what a poll needs: for every rotation r
        the two prefix columns pre_r[:, (j, k)] and the two suffix rows
        suf_{r+1}[(j, k), :], plus the fully assembled base block."""
        n, m, cols = self.n, self.m, self.cols
        nr = angles.shape[0]
        phases = angles[:, :n]
        cos_t = np.cos(angles[:, n::2])
        sin_t = np.sin(angles[:, n::2])
        eph = np.exp(1j * angles[:, n + 1 :: 2])
        g2 = self._g2(cos_t, sin_t, eph)  # (R, m, 2, 2)
        pg = np.empty((nr, m, n, 2), dtype=np.complex128)
        cur = np.empty((nr, n, n), dtype=np.complex128)
        cur[:] = np.eye(n)
        for r in range(m):
            jk = self.pairs[r]
            blk = cur[:, :, jk]
            pg[:, r] = blk
            cur[:, :, jk] = blk @ g2[:, r]
        sg = np.empty((nr, m, 2, cols), dtype=np.complex128)
        tail = np.zeros((nr, n, cols), dtype=np.complex128)
        for l in range(min(n, cols)):
            tail[:, l, l] = np.exp(1j * phases[:, l])
        for r in range(m - 1, -1, -1):
            jk = self.pairs[r]
            blk = tail[:, jk]
            sg[:, r] = blk
            tail[:, jk] = g2[:, r] @ blk
        return pg, sg, tail, g2, cos_t, sin_t, eph

    @staticmethod
    def _g2(cos_t, sin_t, eph):
        # stack of 2x2 rotation blocks for arrays of angle values
        g = np.empty(cos_t.shape + (2, 2), dtype=np.complex128)
        g[..., 0, 0] = cos_t
        g[..., 0, 1] = -eph * sin_t
        g[..., 1, 0] = np.conj(eph) * sin_t
        g[..., 1, 1] = cos_t
        return g

    def poll(self, angles: np.ndarray, steps: np.ndarray) -> np.ndarray:
        """Candidate values for a stack of poll points.

        angles is (R, n*n), steps is (R,); returns (R, 2*n*n) in the fixed
        candidate order (phase +/- per column slot, then theta+/theta-/
        phi+/phi- per rotation).
        """
        n, m, cols = self.n, self.m, self.cols
        nr = angles.shape[0]
        pg, sg, base, g0, cos_t, sin_t, eph = self._chains(angles)

        cands = np.empty((nr, 2 * n * n, n, cols), dtype=np.complex128)
        # phase coordinates: scaling one kept column of the base
        cands[:, : 2 * n] = base[:, None]
        up = np.exp(1j * steps)
        for l in range(min(n, cols)):
            cands[:, 2 * l, :, l] *= up[:, None]
            cands[:, 2 * l + 1, :, l] *= np.conj(up)[:, None]

        if m:
            th = angles[:, n::2]
            st = steps[:, None]
            twist = np.exp(1j * st)
            variants = np.stack(
                [
                    self._g2(np.cos(th + st), np.sin(th + st), eph),
                    self._g2(np.cos(th - st), np.sin(th - st), eph),
                    self._g2(cos_t, sin_t, eph * twist),
                    self._g2(cos_t, sin_t, eph * np.conj(twist)),
                ],
                axis=2,
            )  # (R, m, 4, 2, 2)
            dg = variants - g0[:, :, None]
            inner = np.matmul(dg, sg[:, :, None])  # (R, m, 4, 2, cols)
            delta = np.matmul(pg[:, :, None], inner)  # (R, m, 4, n, cols)
            cands[:, 2 * n :] = base[:, None] + delta.reshape(nr, 4 * m, n, cols)

        flat = cands.reshape(nr * 2 * n * n, n, cols)
        return self._eval(flat).reshape(nr, 2 * n * n)

    def candidate_delta(self, idx: int, step: float) -> tuple[int, float]:
        n = self.n
        if idx < 2 * n:
            return idx // 2, step if idx % 2 == 0 else -step
        idx -= 2 * n
        r, v = divmod(idx, 4)
        coord = n + 2 * r + (0 if v < 2 else 1)
        return coord, step if v % 2 == 0 else -step


def _forcing(step: float) -> float:
    # Sufficient-decrease margin: a move must beat the incumbent by this or
    # the step is halved. Quadratic in the step, so it does not limit the
    # accuracy reachable at tol, but it stops noise-level improvements from
    # pinning the step at a coarse level for the whole iteration budget; the
    # floor keeps round-off wiggle from ever counting as progress.
    return 1e-4 * step * step + 1e-12


def _pattern_search(engine, start: np.ndarray, cfg: OptimizerConfig) -> tuple[float, np.ndarray]:
    angles = np.array(start, dtype=np.float64)
    best = engine.value(angles)
    step = cfg.initial_step
    iters = 0
    while iters < cfg.max_iters and step >= cfg.tol:
        iters += 1
        vals = engine.poll(angles, step)
        q = int(np.argmax(vals))
        if vals[q] > best + _forcing(step):
            coord, delta = engine.candidate_delta(q, step)
            angles = angles.copy()
            angles[coord] += delta
            best = vals[q]
        else:
            step *= cfg.shrink_factor
    # Re-evaluate through the single-point path so the reported value is
    # exactly what the returned parameters give, not the incremental
    # bookkeeping of the poll loop.
    return engine.value(angles), angles


def _pattern_search_many(engine, starts: np.ndarray, cfg: OptimizerConfig):
    """Advance every restart's compass search in lockstep.

    Each restart follows exactly the trajectory it would follow on its own
    (own incumbent, own step, own iteration count); only the objective
    evaluations are pooled across the live restarts. Returns a list of
    (value, angles) in restart order.
    """
    nr = starts.shape[0]
    angles = np.array(starts, dtype=np.float64)
    best = engine.values(angles)
    steps = np.full(nr, cfg.initial_step)
    iters = np.zeros(nr, dtype=np.intp)
    live = np.ones(nr, dtype=bool)
    while True:
        idx = np.nonzero(live)[0]
        if idx.size == 0:
            break
        vals = engine.poll(angles[idx], steps[idx])
        picks = np.argmax(vals, axis=1)
        for t, r in enumerate(idx):
            step = float(steps[r])
            v = float(vals[t, picks[t]])
            if v > best[r] + _forcing(step):
                coord, delta = engine.candidate_delta(int(picks[t]), step)
                angles[r, coord] += delta
                best[r] = v
            else:
                steps[r] *= cfg.shrink_factor
            iters[r] += 1
            if iters[r] >= cfg.max_iters or steps[r] < cfg.tol:
                live[r] = False
    return [(engine.value(angles[r]), angles[r].copy()) for r in range(nr)]


def _restart_seeds(cfg: OptimizerConfig) -> np.ndarray:
    return np.random.SeedSequence(cfg.seed).generate_state(cfg.restarts)


def maximize(
    objective,
    dim: int,
    config: OptimizerConfig | None = None,
    *,
    batch_objective=None,
    columns: int | None = None,
    warm_starts=(),
    progress=None,
) -> tuple[float, UnitaryParam]:
    """Maximize a real objective over dim x dim unitaries.

    objective maps a UnitaryParam to a float. When `batch_objective` is
    given it must map a (B, dim, columns) stack of decoded first-column
    blocks to B values consistent with `objective`; the search then
    evaluates whole polls vectorized. `warm_starts` are explicit unitaries
    searched before the seeded Haar restarts (they occupy the lowest restart
    indices). Ties between restarts keep the lowest index; two runs with the
    same seed and config return identical results.
    """
    cfg = config if config is not None else OptimizerConfig()
    n = int(dim)
    if n < 1:
        raise InvalidArgument(f"maximize: dim must be >= 1, got {n}")
    cols = n if columns is None else int(columns)
    if not (1 <= cols <= n):
        raise InvalidArgument(f"maximize: columns must be in [1, {n}]")

    if batch_objective is not None:
        engine = _BatchEngine(batch_objective, n, cols)
    else:
        engine = _ScalarEngine(objective, n)

    starts = [encode_unitary(np.asarray(w)).angles for w in warm_starts]
    starts += [encode_unitary(haar_unitary(n, int(s))).angles for s in _restart_seeds(cfg)]

    if isinstance(engine, _BatchEngine):
        results = _pattern_search_many(engine, np.stack(starts), cfg)
    else:
        results = [_pattern_search(engine, start, cfg) for start in starts]

    best_val = -math.inf
    best_angles = None
    for r, (val, angles) in enumerate(results):
        if val > best_val:
            best_val, best_angles = val, angles
        if progress is not None:
            progress(r, best_val)
    return best_val, UnitaryParam(n, best_angles)


def minimize(
    objective,
    dim: int,
    config: OptimizerConfig | None = None,
    *,
    batch_objective=None,
    columns: int | None = None,
    warm_starts=(),
    progress=None,
) -> tuple[float, UnitaryParam]:
    """Minimize: exactly `maximize` of the negated objective, sign-corrected."""
    neg = None if objective is None else (lambda p: -objective(p))
    negb = None if batch_objective is None else (lambda v: -np.asarray(batch_objective(v)))
    track = None if progress is None else (lambda r, best: progress(r, -best))
    val, param = maximize(
        neg,
        dim,
        config,
        batch_objective=negb,
        columns=columns,
        warm_starts=warm_starts,
        progress=track,
    )
    return -val, param
