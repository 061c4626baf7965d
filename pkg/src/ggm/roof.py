"""Mixed-state pipeline: phase minimization, convexity diagnostics, and
convex envelopes over the mixing simplex.

For a mixed state invariant under a finite local-unitary group, the
entanglement equals the phase-minimized pure value of any preimage member,
convexified over the mixing parameters where the minimized value fails to
be convex. The decomposition sampler provides an independent upper bound
on the same quantity, so the two routes can be cross-checked without a
closed form.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import _batch
from .hilbert import DensityMatrix, PureState
from .pure import ggm_values
from .twirl import UnitaryGroup, verify_invariance, verify_preimage

__all__ = [
    "TwirledFamily",
    "GgmSurface",
    "HessianReport",
    "min_phase_ggm",
    "min_phase_ggm_many",
    "hessian_report",
    "convex_envelope_1d",
    "convex_envelope_2d",
    "lower_hull_contacts",
    "envelope_evaluator_2d",
    "ggm_mixed",
    "closed_form",
    "hjw_upper_bound",
    "simplex_grid",
    "CLOSED_FORMS",
    "HESSIAN_STEP",
    "NONCONVEX_TOL",
]

HESSIAN_STEP = 1e-3
NONCONVEX_TOL = 1e-6
PHASE_GRID_POINTS = 32
PHASE_STEP_TOL = 1e-4
DEFAULT_GRID_1D = 201
DEFAULT_GRID_2D = 101


@dataclass(frozen=True, eq=False)
class TwirledFamily:
    """A twirl-invariant mixture together with its phase-orbit preimage.

    ``basis`` is the orthonormal list of pure states being mixed, ``weights``
    a reference probability vector over it. Construction verifies that the
    group twirl fixes the target mixture and maps phased superpositions of
    the basis onto it; both checks raise on failure.

    ``param_names``/``weight_map`` describe how points of the family's
    mixing simplex translate to weight vectors (identity padding with the
    residual weight when no map is given).
    """

    group: UnitaryGroup
    basis: tuple[PureState, ...]
    weights: np.ndarray
    name: str = ""
    param_names: tuple[str, ...] = ()
    weight_map: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, repr=False)

    def __post_init__(self):
        basis = tuple(self.basis)
        if len(basis) < 2:
            raise ValueError("a twirled family needs at least two basis states")
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.size != len(basis):
            raise ValueError("weights length does not match basis length")
        object.__setattr__(self, "basis", basis)
        weights = weights.copy()
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        if not self.param_names:
            names = ("x",) if len(basis) == 2 else tuple(
                f"x{i + 1}" for i in range(len(basis) - 1))
            object.__setattr__(self, "param_names", names)
        inv = verify_invariance(self.group, self.target)
        if not inv.ok:
            raise ValueError(
                f"group does not fix the target mixture (deviation {inv.max_deviation:.3e})")
        pre = verify_preimage(self.group, basis, weights)
        if not pre.ok:
            raise ValueError(
                f"family fails the preimage check (deviation {pre.max_deviation:.3e})")

    @property
    def free_phases(self) -> int:
        return len(self.basis) - 1

    @property
    def shape(self):
        return self.basis[0].shape

    @property
    def target(self) -> DensityMatrix:
        return self.target_at(self.weights)

    def target_at(self, weights) -> DensityMatrix:
        return DensityMatrix.mixture(self.basis, weights)

    def params_to_weights(self, params) -> np.ndarray:
        """Weight vector for one point of the mixing simplex."""
        params = np.asarray(params, dtype=float).reshape(-1)
        if params.size != len(self.param_names):
            raise ValueError(
                f"expected {len(self.param_names)} parameters, got {params.size}")
        if self.weight_map is not None:
            w = np.asarray(self.weight_map(params), dtype=float)
        else:
            w = np.append(params, 1.0 - params.sum())
        if w.min() < -1e-9 or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"parameters {params} leave the mixing simplex")
        return np.clip(w, 0.0, None)

    def _objective(self) -> _batch.PhaseObjective:
        mat = np.stack([b.amplitudes for b in self.basis])
        return _batch.PhaseObjective(mat, self.shape.dims)


def min_phase_ggm_many(family: TwirledFamily, params) -> tuple[np.ndarray, np.ndarray]:
    """Phase-minimized values at many simplex parameter points at once.

    Vectorized raw-surface evaluation without envelope or Hessian columns;
    returns ``(values, phases)`` with shapes (K,) and (K, n_basis).
    """
    params = np.atleast_2d(np.asarray(params, dtype=float))
    weights = np.stack([family.params_to_weights(p) for p in params])
    return _batch.minimize_phases(
        family._objective(), weights,
        grid_points=PHASE_GRID_POINTS, step_tol=PHASE_STEP_TOL)


def min_phase_ggm(family: TwirledFamily, weights=None, *,
                  grid_points: int = PHASE_GRID_POINTS,
                  step_tol: float = PHASE_STEP_TOL) -> tuple[float, np.ndarray]:
    """Minimize the pure measure of a preimage member over its free phases.

    Searches a ``grid_points`` grid per free phase followed by cyclic
    coordinate descent with golden-section refinement until the step falls
    below ``step_tol`` radians. Basis elements with weight exactly 0 are
    dropped from the search; the first active element carries phase 0 as
    the global-phase gauge.

    Returns ``(value, phases)`` with one phase per basis element.
    """
    weights = family.weights if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (len(family.basis),):
        raise ValueError("weights length does not match the family basis")
    values, phases = _batch.minimize_phases(
        family._objective(), weights[None, :],
        grid_points=grid_points, step_tol=step_tol)
    return float(values[0]), phases[0]


@dataclass(frozen=True, eq=False)
class HessianReport:
    """Minimum Hessian eigenvalue per evaluated point.

    Points closer than ``2 h`` to the simplex boundary are skipped and keep
    a NaN eigenvalue; ``flagged`` marks evaluated points whose minimum
    eigenvalue falls below the nonconvexity threshold.
    """

    points: np.ndarray
    min_eigenvalues: np.ndarray
    skipped: np.ndarray
    flagged: np.ndarray

    @property
    def any_flagged(self) -> bool:
        return bool(self.flagged.any())


def _simplex_margin(points: np.ndarray) -> np.ndarray:
    return np.minimum(points.min(axis=1), 1.0 - points.sum(axis=1))


def _hessian_offsets(arity: int, h: float):
    """Stencil offsets (beyond the center) for a central-difference Hessian."""
    offsets = []
    for i in range(arity):
        e = np.zeros(arity)
        e[i] = h
        offsets.extend([e.copy(), -e])
    for i in range(arity):
        for j in range(i + 1, arity):
            ei, ej = np.zeros(arity), np.zeros(arity)
            ei[i] = h
            ej[j] = h
            offsets.extend([ei + ej, ei - ej, -ei + ej, -ei - ej])
    return np.array(offsets)


def _assemble_hessian_min_eig(arity, h, center_value, stencil_values):
    hess = np.zeros((arity, arity))
    for i in range(arity):
        fp, fm = stencil_values[2 * i], stencil_values[2 * i + 1]
        hess[i, i] = (fp - 2.0 * center_value + fm) / (h * h)
    pos = 2 * arity
    for i in range(arity):
        for j in range(i + 1, arity):
            fpp, fpm, fmp, fmm = stencil_values[pos:pos + 4]
            pos += 4
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    return float(np.linalg.eigvalsh(hess)[0])


def hessian_report(f: Callable, points, h: float = HESSIAN_STEP, *,
                   flag_tol: float = NONCONVEX_TOL) -> HessianReport:
    """Central-difference Hessian diagnostics on simplex points.

    ``f`` maps a vector of free simplex coordinates (the last weight
    eliminated) to a value; ``points`` is an (K, arity) array. A point is
    flagged nonconvex when the minimum eigenvalue of its symmetrized
    Hessian falls below ``-flag_tol``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k, arity = points.shape
    offsets = _hessian_offsets(arity, h)
    min_eig = np.full(k, np.nan)
    skipped = _simplex_margin(points) < 2.0 * h
    for idx in range(k):
        if skipped[idx]:
            continue
        center = f(points[idx])
        stencil = [f(points[idx] + off) for off in offsets]
        min_eig[idx] = _assemble_hessian_min_eig(arity, h, center, stencil)
    flagged = ~skipped & (min_eig < -flag_tol)
    return HessianReport(points, min_eig, skipped, flagged)


def lower_hull_contacts(t: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Indices of the samples on the lower convex hull (monotone chain)."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.size < 2:
        raise ValueError("need at least 2 samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("abscissae must be strictly increasing")
    hull = [0]
    for i in range(1, t.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (t[b] - t[a]) * (values[i] - values[a]) \
                - (values[b] - values[a]) * (t[i] - t[a])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull)


def convex_envelope_1d(t, values) -> np.ndarray:
    """Greatest convex minorant of 1-D samples, evaluated at the abscissae."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    contacts = lower_hull_contacts(t, values)
    env = np.interp(t, t[contacts], values[contacts])
    return np.minimum(env, values)


def envelope_evaluator_2d(points, values) -> Callable[[np.ndarray], np.ndarray]:
    """Callable evaluating the 2-D lower convex envelope at query points.

    The envelope is the maximum over the lower faces of the convex hull of
    the lifted cloud (x1, x2, value); each lower face extends to a
    supporting plane of the envelope, so the pointwise maximum of the face
    planes reproduces it everywhere inside the sampled region.
    """
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("expected an (K, 2) array of grid points")
    if points.shape[0] < 3:
        raise ValueError("need at least 3 grid points")
    centered = points - points.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-9) < 2:
        raise ValueError("grid points are collinear")

    # Affine data makes the lifted cloud flat, which Qhull rejects; the
    # envelope is then the fitted plane itself.
    design = np.column_stack([np.ones(points.shape[0]), points])
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    if np.max(np.abs(design @ coeffs - values)) < 1e-12:
        def affine(query):
            query = np.atleast_2d(np.asarray(query, dtype=float))
            return coeffs[0] + query @ coeffs[1:]
        return affine

    try:
        hull = ConvexHull(np.column_stack([points, values]))
    except QhullError as exc:
        raise ValueError(f"degenerate grid for the convex envelope: {exc}") from exc
    lower = hull.equations[hull.equations[:, 2] < -1e-12]

    def evaluate(query):
        query = np.atleast_2d(np.asarray(query, dtype=float))
        # plane: n0 x + n1 y + n2 z + off = 0  ->  z = -(n0 x + n1 y + off)/n2
        planes = -(query @ lower[:, :2].T + lower[:, 3]) / lower[:, 2]
        return planes.max(axis=1)

    return evaluate


def convex_envelope_2d(points, values) -> np.ndarray:
    """Lower convex envelope of samples over a 2-D region, at the samples."""
    evaluate = envelope_evaluator_2d(points, values)
    return np.minimum(evaluate(points), np.asarray(values, dtype=float))


def simplex_grid(resolution: int, arity: int) -> np.ndarray:
    """Lexicographically ordered grid on the ``arity``-dimensional simplex.

    For arity 1 this is ``resolution`` points on [0, 1]; for arity 2 the
    triangular grid with ``resolution`` points per axis.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    axis = np.linspace(0.0, 1.0, resolution)
    if arity == 1:
        return axis[:, None]
    if arity == 2:
        pts = [(a, b) for a in axis for b in axis if a + b <= 1.0 + 1e-12]
        return np.array(pts)
    raise ValueError("simplex grids are provided for 1 or 2 parameters")


@dataclass(frozen=True, eq=False)
class GgmSurface:
    """Sampled mixed-state measure over the mixing simplex.

    ``raw`` is the phase-minimized value per grid point, ``envelope`` its
    convexification over the sampled region, ``hessian_min_eig`` the
    minimum Hessian eigenvalue (NaN near the boundary), ``phase_argmin``
    the minimizing phases per point (one column per basis element).
    """

    param_names: tuple[str, ...]
    grid: np.ndarray
    weights: np.ndarray
    raw: np.ndarray
    envelope: np.ndarray
    hessian_min_eig: np.ndarray
    phase_argmin: np.ndarray

    def envelope_at(self, query) -> np.ndarray:
        """Envelope value at arbitrary points of the sampled region."""
        query = np.atleast_2d(np.asarray(query, dtype=float))
        if self.grid.shape[1] == 1:
            contacts = lower_hull_contacts(self.grid[:, 0], self.raw)
            return np.interp(query[:, 0], self.grid[contacts, 0], self.raw[contacts])
        return envelope_evaluator_2d(self.grid, self.raw)(query)

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        phase_cols = [f"phase_{i + 1}" for i in range(self.phase_argmin.shape[1])]
        writer.writerow(list(self.param_names)
                        + ["raw", "envelope", "hessian_min_eig"] + phase_cols)
        for i in range(self.grid.shape[0]):
            row = [_fmt(v) for v in self.grid[i]]
            row += [_fmt(self.raw[i]), _fmt(self.envelope[i]),
                    _fmt(self.hessian_min_eig[i])]
            row += [_fmt(v) for v in self.phase_argmin[i]]
            writer.writerow(row)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _fmt(value) -> str:
    if np.isnan(value):
        return "nan"
    return format(float(value), ".12g")


def ggm_mixed(family: TwirledFamily, grid=None, *, grid_resolution: int | None = None,
              hessian_step: float = HESSIAN_STEP,
              include_hessian: bool = True) -> GgmSurface:
    """Full mixed-state pipeline over a simplex grid of family parameters.

    Re-verifies the preimage property, phase-minimizes the pure measure at
    every grid point, convexifies over the sampled simplex (1- or
    2-parameter grids), and fills central-difference Hessian diagnostics at
    interior points (warm-started from each point's own minimizing phases).
    """
    pre = verify_preimage(family.group, family.basis, family.weights, random_draws=5)
    if not pre.ok:
        raise ValueError(
            f"family fails the preimage check (deviation {pre.max_deviation:.3e})")

    arity = len(family.param_names)
    if arity > 2:
        raise ValueError(
            f"surface pipeline supports 1- or 2-parameter families; "
            f"{family.name or 'family'} has {arity} (use min_phase_ggm_many "
            f"for raw values)")
    if grid is None:
        if grid_resolution is None:
            grid_resolution = DEFAULT_GRID_1D if arity == 1 else DEFAULT_GRID_2D
        grid = simplex_grid(grid_resolution, arity)
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.shape[1] != arity:
        raise ValueError(f"grid arity {grid.shape[1]} does not match family "
                         f"parameters {family.param_names}")

    weights = np.stack([family.params_to_weights(p) for p in grid])
    objective = family._objective()
    raw, phases = _batch.minimize_phases(
        objective, weights, grid_points=PHASE_GRID_POINTS, step_tol=PHASE_STEP_TOL)

    if arity == 1:
        envelope = convex_envelope_1d(grid[:, 0], raw)
    else:
        envelope = convex_envelope_2d(grid, raw)
    envelope = np.minimum(envelope, raw)

    hessian = np.full(grid.shape[0], np.nan)
    if include_hessian:
        interior = np.flatnonzero(_simplex_margin(grid) >= 2.0 * hessian_step)
        if interior.size:
            offsets = _hessian_offsets(arity, hessian_step)
            stencil_pts = (grid[interior][:, None, :] + offsets[None, :, :]).reshape(
                -1, arity)
            stencil_w = np.stack([family.params_to_weights(p) for p in stencil_pts])
            init = np.repeat(phases[interior], len(offsets), axis=0)
            stencil_vals, _ = _batch.minimize_phases(
                objective, stencil_w, init_phases=init,
                step_tol=PHASE_STEP_TOL, scan=False, max_cycles=3)
            stencil_vals = stencil_vals.reshape(interior.size, len(offsets))
            for row, idx in enumerate(interior):
                hessian[idx] = _assemble_hessian_min_eig(
                    arity, hessian_step, raw[idx], stencil_vals[row])

    return GgmSurface(
        param_names=tuple(family.param_names),
        grid=grid,
        weights=weights,
        raw=raw,
        envelope=envelope,
        hessian_min_eig=hessian,
        phase_argmin=phases,
    )


def _closed_form_rank2_sym(params):
    x = params[0]
    return 0.5 * (1.0 - 2.0 * math.sqrt(x * (1.0 - x)))


def _closed_form_rank3_ghz_w(params):
    x1, x2 = params
    x3 = 1.0 - x1 - x2
    cross = math.sqrt(max(x2 * x3, 0.0))
    radicand = (1.0 - 5.0 * x1 * x1 - 12.0 * x2 * (x2 - 1.0)
                + 8.0 * math.sqrt(max(6.0 * x1 * x2, 0.0)) * (1.0 + cross - x1 - x2)
                + 4.0 * x1 * (1.0 + 3.0 * cross - 3.0 * x2))
    return (3.0 - math.sqrt(max(radicand, 0.0))) / 6.0


def _closed_form_rank5_5qubit(params):
    x1, x2 = params
    x3 = 1.0 - x1 - x2
    a = (2.0 * x1 + 4.0 * x2 + 3.0) / 10.0
    b = (7.0 - 2.0 * x1 - 4.0 * x2) / 10.0
    c = (math.sqrt(max(x1 * x2, 0.0) / 20.0)
         + math.sqrt(max(x1 * x3, 0.0) / 20.0)
         + 2.0 * x2 / (5.0 * math.sqrt(2.0))
         + 2.0 * x3 / (5.0 * math.sqrt(2.0))
         + 0.3 * math.sqrt(max(x2 * x3, 0.0)))
    return 0.5 * (1.0 - math.sqrt(max(1.0 - 4.0 * (a * b - c * c), 0.0)))


def _closed_form_qutrit(params):
    x1, x2 = params
    x3 = 1.0 - x1 - x2
    return (2.0 / 3.0) * (1.0 - math.sqrt(max(x1 * x2, 0.0))
                          - math.sqrt(max(x1 * x3, 0.0))
                          - math.sqrt(max(x2 * x3, 0.0)))


CLOSED_FORMS = {
    "rank2_sym": (1, _closed_form_rank2_sym),
    "rank3_ghz_w": (2, _closed_form_rank3_ghz_w),
    "rank5_5qubit": (2, _closed_form_rank5_5qubit),
    "qutrit": (2, _closed_form_qutrit),
}


def closed_form(form_id: str, params) -> float:
    """Literal evaluation of one of the printed mixed-state expressions."""
    if form_id not in CLOSED_FORMS:
        raise ValueError(f"unknown closed form {form_id!r}; "
                         f"expected one of {sorted(CLOSED_FORMS)}")
    arity, fn = CLOSED_FORMS[form_id]
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != arity:
        raise ValueError(f"{form_id} takes {arity} parameter(s), got {params.size}")
    if params.min() < -1e-12 or params.sum() > 1.0 + 1e-12:
        raise ValueError(f"parameters {params} lie outside the closed simplex")
    return float(fn(np.clip(params, 0.0, 1.0)))


def hjw_upper_bound(rho: DensityMatrix, m: int, samples: int, seed: int) -> float:
    """Decomposition-sampling upper bound on the convex-roof measure.

    Every decomposition of ``rho`` into ``m`` pure states arises from an
    m x r isometry applied to the weighted eigenbasis (r = rank); sampling
    isometries by QR-orthonormalization of complex Gaussian matrices and
    averaging the pure measure over each decomposition bounds the roof from
    above. The eigendecomposition itself is always included as the first
    candidate, and results are deterministic for a fixed seed.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    eigvals, eigvecs = np.linalg.eigh(rho.entries)
    keep = eigvals > 1e-12
    lam, vecs = eigvals[keep], eigvecs[:, keep]
    rank = int(lam.size)
    if m < rank:
        raise ValueError(f"decomposition size {m} is below the rank {rank}")
    weighted = vecs * np.sqrt(lam)  # columns sqrt(lam_i)|e_i>

    rng = np.random.default_rng(seed)
    best = math.inf
    chunk = max(1, min(samples, 262144 // (m * rho.shape.total_dim) + 1))
    produced = 0
    while produced < samples:
        count = min(chunk, samples - produced)
        members = []
        probs = []
        for s in range(count):
            if produced + s == 0:
                iso = np.eye(m, rank, dtype=complex)
            else:
                gauss = rng.standard_normal((m, rank)) \
                    + 1j * rng.standard_normal((m, rank))
                q, r = np.linalg.qr(gauss)
                diag = np.diagonal(r)
                iso = q * (diag / np.abs(diag))
            unnorm = weighted @ iso.conj().T  # (dim, m)
            p = np.sum(np.abs(unnorm) ** 2, axis=0)
            live = p > 1e-14
            members.append(unnorm[:, live].T / np.sqrt(p[live])[:, None])
            probs.append((np.flatnonzero(live), p[live]))
        stacked = np.concatenate(members, axis=0)
        vals = ggm_values(stacked, rho.shape)
        pos = 0
        for live, p in probs:
            best = min(best, float(p @ vals[pos:pos + live.size]))
            pos += live.size
        produced += count
    return max(best, 0.0)
