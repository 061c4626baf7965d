"""Vectorized evaluation kernels shared by the pure and mixed pipelines.

Everything here operates on raw complex arrays; validation and the public
contracts live in the calling modules. Batches are processed in fixed
chunks so memory stays bounded and results are independent of chunking.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .hilbert import SystemShape, enumerate_bipartitions

_CHUNK = 1 << 16


class _CutPlan:
    """Precomputed axis permutation and Gram side for one bipartition."""

    __slots__ = ("perm", "dim_small", "dim_big", "left_is_small")

    def __init__(self, shape, cut):
        self.perm = cut.side_I + cut.side_L
        d_i, d_l = cut.dim_I, cut.dim_L
        self.left_is_small = d_i <= d_l
        self.dim_small = min(d_i, d_l)
        self.dim_big = max(d_i, d_l)


def cut_plans(shape: SystemShape) -> list[_CutPlan]:
    return [_CutPlan(shape, cut) for cut in enumerate_bipartitions(shape)]


def _eigmax_herm(mats: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of a stack of small Hermitian matrices."""
    d = mats.shape[-1]
    if d == 1:
        return mats[..., 0, 0].real
    if d == 2:
        # Analytic form; much faster than LAPACK for 2x2 stacks.
        half_tr = 0.5 * (mats[..., 0, 0].real + mats[..., 1, 1].real)
        half_diff = 0.5 * (mats[..., 0, 0].real - mats[..., 1, 1].real)
        disc = np.sqrt(half_diff * half_diff + np.abs(mats[..., 0, 1]) ** 2)
        return half_tr + disc
    return np.linalg.eigvalsh(mats)[..., -1]


def max_schmidt_sq_batch(amps: np.ndarray, dims: tuple[int, ...], plans) -> np.ndarray:
    """Per-state maximum squared Schmidt coefficient over the given cuts.

    ``amps`` has shape (K, total_dim); returns shape (K,).
    """
    k = amps.shape[0]
    best = np.zeros(k)
    for start in range(0, k, _CHUNK):
        chunk = amps[start:start + _CHUNK]
        tensor = chunk.reshape((chunk.shape[0],) + tuple(dims))
        chunk_best = np.zeros(chunk.shape[0])
        for plan in plans:
            perm = (0,) + tuple(a + 1 for a in plan.perm)
            if plan.left_is_small:
                mat = tensor.transpose(perm).reshape(
                    chunk.shape[0], plan.dim_small, plan.dim_big)
            else:
                mat = tensor.transpose(perm).reshape(
                    chunk.shape[0], plan.dim_big, plan.dim_small)
                mat = mat.transpose(0, 2, 1)
            gram = mat @ mat.conj().transpose(0, 2, 1)
            np.maximum(chunk_best, _eigmax_herm(gram), out=chunk_best)
        best[start:start + _CHUNK] = chunk_best
    return np.clip(best, 0.0, 1.0)


def ggm_batch(amps: np.ndarray, dims: tuple[int, ...], plans=None) -> np.ndarray:
    if plans is None:
        plans = cut_plans(SystemShape(tuple(dims)))
    return 1.0 - max_schmidt_sq_batch(amps, tuple(dims), plans)


class PhaseObjective:
    """GGM of sum_k sqrt(w_k) e^{i phi_k} |basis_k> as a function of phases.

    Evaluates whole batches of (weights, phases) rows at once; one instance
    is reused across an entire surface computation.
    """

    def __init__(self, basis_matrix: np.ndarray, dims: tuple[int, ...]):
        self.basis = np.asarray(basis_matrix, dtype=complex)  # (n_basis, D)
        self.dims = tuple(dims)
        self.plans = cut_plans(SystemShape(self.dims))

    @property
    def n_basis(self) -> int:
        return self.basis.shape[0]

    def values(self, roots: np.ndarray, phases: np.ndarray) -> np.ndarray:
        """GGM for rows of sqrt-weights ``roots`` and ``phases``, both (K, n)."""
        coeff = roots * np.exp(1j * phases)
        return ggm_batch(coeff @ self.basis, self.dims, self.plans)


def _golden_refine(objective, roots, phases, coord, rows, half_width, step_tol):
    """Lockstep golden-section refinement of one phase coordinate.

    Only ``rows`` participate; the rest keep their phase. Brackets shrink
    until narrower than ``step_tol`` radians.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    lo = phases[rows, coord] - half_width
    hi = phases[rows, coord] + half_width

    def probe(vals):
        p = phases[rows].copy()
        p[:, coord] = vals
        return objective.values(roots[rows], p)

    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = probe(c), probe(d)
    while np.max(hi - lo) > step_tol:
        left = fc < fd
        old_c, old_d, old_fc, old_fd = c, d, fc, fd
        hi = np.where(left, old_d, hi)
        lo = np.where(left, lo, old_c)
        width = hi - lo
        c = np.where(left, hi - invphi * width, old_d)
        d = np.where(left, old_c, lo + invphi * width)
        fresh = probe(np.where(left, c, d))
        fc = np.where(left, fresh, old_fd)
        fd = np.where(left, old_fc, fresh)
    phases[rows, coord] = 0.5 * (lo + hi)


def _joint_seed_size(n_free: int) -> int:
    # Joint seeding guards against coordinate descent stalling in a local
    # minimum when several phases must move together; sizes keep the
    # Cartesian budget flat across arities.
    if n_free <= 1:
        return 0
    return 8 if n_free <= 3 else 4


def _apply_joint_seeds(objective, roots, phases, values, active, gauge):
    """Replace each row's starting phases by its best Cartesian seed.

    Rows are grouped by their pattern of active (weight > 0) coordinates so
    that seeds only range over genuinely free phases.
    """
    groups: dict[tuple, list[int]] = {}
    for row in range(active.shape[0]):
        groups.setdefault(
            (active[row].tobytes(), int(gauge[row])), []).append(row)
    for (active_key, g), members in groups.items():
        mask = np.frombuffer(active_key, dtype=bool)
        free = [c for c in range(mask.size) if mask[c] and c != g]
        size = _joint_seed_size(len(free))
        if size == 0:
            continue
        rows = np.array(members)
        angles = np.linspace(0.0, 2.0 * np.pi, size, endpoint=False)
        combos = np.array(list(itertools.product(angles, repeat=len(free))))
        per_call = max(1, _CHUNK // rows.size)
        for start in range(0, combos.shape[0], per_call):
            block = combos[start:start + per_call]
            cand = np.repeat(phases[rows][:, None, :], block.shape[0], axis=1)
            cand[:, :, free] = block[None, :, :]
            cand = cand.reshape(-1, phases.shape[1])
            vals = objective.values(
                np.repeat(roots[rows], block.shape[0], axis=0), cand
            ).reshape(rows.size, block.shape[0])
            best = np.argmin(vals, axis=1)
            improved = vals[np.arange(rows.size), best] < values[rows]
            hit = rows[improved]
            values[hit] = vals[improved, best[improved]]
            phases[hit] = cand.reshape(rows.size, block.shape[0], -1)[
                improved, best[improved]]


def minimize_phases(
    objective: PhaseObjective,
    weights: np.ndarray,
    init_phases: np.ndarray | None = None,
    *,
    grid_points: int = 32,
    step_tol: float = 1e-4,
    value_tol: float = 1e-9,
    max_cycles: int = 8,
    scan: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate-descent phase minimization for a batch of weight rows.

    Each row minimizes over the phases of its strictly positive weights;
    the first active element is gauged to phase 0. Cold starts are seeded
    with the best point of a joint Cartesian phase lattice, then per cycle
    every free coordinate is scanned on a ``grid_points`` grid (when
    ``scan``) and refined by golden section to below ``step_tol`` radians.
    Cycles repeat until no row improves by more than ``value_tol``.

    Returns (values, phases), shapes (K,) and (K, n_basis).
    """
    weights = np.asarray(weights, dtype=float)
    k, n = weights.shape
    roots = np.sqrt(np.clip(weights, 0.0, None))
    active = weights > 0.0
    gauge = np.argmax(active, axis=1)

    cold_start = init_phases is None
    phases = np.zeros((k, n)) if cold_start else np.array(init_phases, dtype=float)
    phases[~active] = 0.0
    phases[np.arange(k), gauge] = 0.0

    grid = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    half_width = 2.0 * np.pi / grid_points
    values = objective.values(roots, phases)
    if cold_start and scan:
        _apply_joint_seeds(objective, roots, phases, values, active, gauge)

    for _ in range(max_cycles):
        cycle_start = values.copy()
        for coord in range(n):
            rows = np.flatnonzero(active[:, coord] & (gauge != coord))
            if rows.size == 0:
                continue
            if scan:
                cand_phases = np.repeat(phases[rows], grid_points, axis=0)
                cand_phases[:, coord] = np.tile(grid, rows.size)
                cand = objective.values(
                    np.repeat(roots[rows], grid_points, axis=0), cand_phases
                ).reshape(rows.size, grid_points)
                best = np.argmin(cand, axis=1)
                better = cand[np.arange(rows.size), best] < values[rows]
                phases[rows[better], coord] = grid[best[better]]
            _golden_refine(objective, roots, phases, coord, rows, half_width, step_tol)
        values = objective.values(roots, phases)
        if np.max(cycle_start - values) <= value_tol:
            break
    phases = np.mod(phases + np.pi, 2.0 * np.pi) - np.pi
    phases[~active] = 0.0
    phases[np.arange(k), gauge] = 0.0
    return values, phases
