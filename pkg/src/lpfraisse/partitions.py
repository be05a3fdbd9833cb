"""Axis-box partitions with small bounded cells and controlled tails, pullback
cells over a discrete space, conditional expectations, and the envelope
pipeline that re-embeds a finite-dimensional function space into a weighted
sequence space.

Breakpoints snap to midpoints between consecutive distinct atom values so
every cell is a continuity set of the pushforward measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from lpfraisse.core import PIndex, rng_from_seed
from lpfraisse.geometry import Subspace, auerbach_basis
from lpfraisse.measures import DiscreteSpace

TAIL = -1  # interval index of the unbounded piece |t| > K


class CellMismatchError(ValueError):
    def __init__(self, offending):
        self.offending = offending
        super().__init__(f"positive source cells have no mass on the target side: {sorted(offending)}")


@dataclass(frozen=True)
class BoxPartition:
    dim: int
    K: float
    epsilon: float
    breakpoints: tuple[tuple[float, ...], ...]  # per axis, -K .. K inclusive

    def interval_index(self, axis: int, value: float) -> int:
        """Index of the axis interval containing value; TAIL when |value| > K."""
        if abs(value) > self.K:
            return TAIL
        bp = self.breakpoints[axis]
        # half-open [b_i, b_{i+1}), last interval closed at K
        idx = int(np.searchsorted(bp, value, side="right")) - 1
        return min(max(idx, 0), len(bp) - 2)

    def cell_key(self, values) -> tuple[int, ...]:
        return tuple(self.interval_index(j, float(values[j])) for j in range(self.dim))

    def max_bounded_width(self, axis: int) -> float:
        bp = self.breakpoints[axis]
        return float(np.max(np.diff(bp)))

    def to_json(self):
        return {
            "dim": self.dim,
            "K": self.K,
            "epsilon": self.epsilon,
            "breakpoints": [list(bp) for bp in self.breakpoints],
        }


@dataclass(frozen=True)
class PullbackPartition:
    cells: dict[tuple[int, ...], tuple[int, ...]]  # cell key -> atom indices

    @property
    def positive_keys(self) -> list[tuple[int, ...]]:
        return sorted(self.cells.keys())

    def bounded_keys(self, axis: int) -> list[tuple[int, ...]]:
        return [k for k in self.positive_keys if k[axis] != TAIL]

    def unbounded_keys(self, axis: int) -> list[tuple[int, ...]]:
        return [k for k in self.positive_keys if k[axis] == TAIL]


def _snap_off(value: float, taken: np.ndarray) -> float:
    step = max(abs(value), 1.0) * 2.0 ** -40
    while np.any(np.isclose(taken, value, rtol=0, atol=0)) or value in taken:
        value += step
    return value


def tail_weight(values: np.ndarray, masses: np.ndarray, K: float, p: float) -> float:
    """max_j sum of |f_j|^p mass over atoms with |f_j| >= K."""
    sel = np.abs(values) >= K
    return float(np.max(np.sum(np.where(sel, np.abs(values) ** p * masses[None, :], 0.0), axis=1)))


def is_appropriate_for(part: BoxPartition, values: np.ndarray, space: DiscreteSpace, p) -> bool:
    """Does the partition satisfy the tail condition for these functions?
    (Box widths are partition-intrinsic and do not depend on the functions.)"""
    pf = float(PIndex.of(p))
    eps = part.epsilon
    return tail_weight(np.atleast_2d(values), space.masses, part.K, pf) < eps**pf / 3


def build_appropriate(values: np.ndarray, space: DiscreteSpace, eps: float, p
                      ) -> tuple[BoxPartition, PullbackPartition]:
    """(eps, K)-appropriate box partition for the functions F plus its pullback.

    K is the smallest value on the dyadic grid max|f| * 2^-i whose tail weight
    stays below eps^p/3; bounded axis intervals have width strictly below
    eps / (3 ||mu||)^(1/p) with breakpoints snapped off atom values.
    """
    if not (0 < eps <= 1):
        raise ValueError("eps must lie in (0, 1]")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    nfun, natoms = values.shape
    pf = float(PIndex.of(p))
    masses = space.masses

    vmax = float(np.max(np.abs(values)))
    if vmax == 0:
        vmax = 1.0
    budget = eps**pf / 3
    K = vmax * (1 + 2.0 ** -20)
    i = 0
    while i < 60:
        cand = vmax * 2.0 ** -(i + 1)
        if cand <= 0 or tail_weight(values, masses, cand, pf) >= budget:
            break
        K = cand
        i += 1
    K = _snap_off(K, np.abs(values).ravel())

    total = float(space.total_mass())
    width = eps / (3 * total) ** (1 / pf)
    breakpoints = []
    for j in range(nfun):
        vals = np.unique(values[j])
        mids = (vals[:-1] + vals[1:]) / 2 if len(vals) > 1 else np.array([])
        bp = [-K]
        while bp[-1] < K:
            lo = bp[-1]
            limit = lo + width * (1 - 1e-9)
            if limit >= K:
                bp.append(K)
                break
            snap = mids[(mids > lo) & (mids <= limit)]
            if snap.size:
                bp.append(float(snap[-1]))
            else:
                bp.append(_snap_off(lo + width * (1 - 1e-6), vals))
        breakpoints.append(tuple(bp))
    part = BoxPartition(nfun, K, eps, tuple(breakpoints))

    cells: dict[tuple[int, ...], list[int]] = {}
    for a in range(natoms):
        key = part.cell_key(values[:, a])
        cells.setdefault(key, []).append(a)
    pb = PullbackPartition({k: tuple(v) for k, v in cells.items()})
    return part, pb


def conditional_expectation(f: np.ndarray, pullback: PullbackPartition, space: DiscreteSpace) -> np.ndarray:
    """Mass-weighted cell averages; a norm-one projection by Jensen."""
    f = np.asarray(f, dtype=float)
    masses = space.masses
    out = np.empty_like(f)
    for atoms in pullback.cells.values():
        idx = list(atoms)
        w = masses[idx]
        out[idx] = float(np.sum(w * f[idx]) / np.sum(w))
    return out


@dataclass(frozen=True)
class Envelope:
    space: DiscreteSpace
    p: PIndex
    eps: float
    partition: BoxPartition
    pullback: PullbackPartition
    cell_keys: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]          # exact cell masses
    basis: np.ndarray                      # (atoms, k) Auerbach-normalized functions
    xi: np.ndarray                         # (cells, k): cell averages of each basis function
    defect: float                          # sampled ||xi - inclusion||

    @property
    def num_cells(self) -> int:
        return len(self.cell_keys)

    def envelope_norm(self, cell_coeffs: np.ndarray) -> float:
        """Weighted p-norm on cell coordinates; isometric to l_p^m."""
        pf = float(self.p)
        w = np.array([float(x) for x in self.weights])
        return float(np.sum(w * np.abs(np.asarray(cell_coeffs, dtype=float)) ** pf) ** (1 / pf))


def _weighted_subspace(basis_vals: np.ndarray, space: DiscreteSpace, p: PIndex) -> tuple[Subspace, np.ndarray]:
    """L_p(mu) embeds isometrically in l_p^n by scaling with mass^(1/p)."""
    scale = space.masses ** (1 / float(p))
    return Subspace(len(space.atoms), p, scale[:, None] * basis_vals), scale


def envelope(basis_vals: np.ndarray, space: DiscreteSpace, eps: float, p,
             seed: int = 0, samples: int = 512) -> Envelope:
    """Envelope of X = span(basis): Auerbach-normalize, build an
    (eps/(6k), K)-appropriate partition, and project by conditional
    expectation.  Requires the constant function in the span."""
    p = PIndex.of(p)
    if p.is_inf:
        raise ValueError("envelopes are built for finite p")
    B = np.atleast_2d(np.asarray(basis_vals, dtype=float))
    if B.ndim != 2:
        raise ValueError("basis must be (atoms, k)")
    natoms, k = B.shape
    ones = np.ones(natoms)
    sol, res, *_ = np.linalg.lstsq(B, ones, rcond=None)
    if np.linalg.norm(B @ sol - ones) > 1e-8:
        raise ValueError("constant function must lie in the span of the basis")
    if float(p) == int(float(p)) and int(float(p)) % 2 == 0:
        pass  # construction still valid; the transfer guarantee needs p not even

    sub, scale = _weighted_subspace(B, space, p)
    au = auerbach_basis(sub, restarts=3, seed=seed, check_samples=500, ascent_rounds=10)
    F = au.vectors / scale[:, None]  # back to plain function values

    part, pb = build_appropriate(F.T, space, eps / (6 * k), p)
    keys = pb.positive_keys
    masses_exact = {key: sum((space.atoms[a][1] for a in pb.cells[key]), Fraction(0)) for key in keys}
    xi = np.zeros((len(keys), k))
    for ci, key in enumerate(keys):
        idx = list(pb.cells[key])
        w = space.masses[idx]
        xi[ci] = (w[:, None] * F[idx]).sum(axis=0) / w.sum()

    rng = rng_from_seed(seed + 1)
    cs = rng.standard_normal((samples, k))
    defect = 0.0
    for c in cs:
        f = F @ c
        ef = conditional_expectation(f, pb, space)
        nf = space.norm(f, p)
        if nf > 1e-12:
            defect = max(defect, space.norm(ef - f, p) / nf)
    env = Envelope(space, p, eps, part, pb, tuple(keys), tuple(masses_exact[kk] for kk in keys),
                   F, xi, defect)
    if defect > eps:
        raise AssertionError(f"envelope defect {defect:.3g} exceeds eps {eps:.3g}")
    return env


@dataclass(frozen=True)
class TransferResult:
    matrix: np.ndarray        # (atoms1, cells): images of the cell indicators
    ratios: tuple[Fraction, ...]
    defect: float
    isometric_exact: bool


def transfer_isometry(env: Envelope, gamma_vals: np.ndarray, space1: DiscreteSpace,
                      seed: int = 0, samples: int = 512) -> TransferResult:
    """Isometry I from the envelope onto cell indicators of the target side.

    gamma_vals holds the images (atoms1 x k) of the envelope's basis.  The
    indicator of a source cell R maps to (mu0(R)/mu1(R'))^(1/p) 1_{R'} where
    R' collects the target atoms falling in the same box; the exponent 1/p is
    what makes the displayed weighted-norm computation come out isometric.
    Target masses are exact rationals, so I is isometric by construction.
    """
    G = np.asarray(gamma_vals, dtype=float)
    natoms1, k = G.shape
    if k != env.basis.shape[1]:
        raise ValueError("gamma must provide images of the envelope basis")
    part = env.partition
    pf = float(env.p)

    target_cells: dict[tuple[int, ...], list[int]] = {}
    for a in range(natoms1):
        key = part.cell_key(G[a])
        target_cells.setdefault(key, []).append(a)

    missing = [key for key in env.cell_keys if key not in target_cells]
    if missing:
        raise CellMismatchError(missing)

    m1 = {key: sum((space1.atoms[a][1] for a in target_cells[key]), Fraction(0)) for key in env.cell_keys}
    ratios = tuple(env.weights[i] / m1[key] for i, key in enumerate(env.cell_keys))
    I = np.zeros((natoms1, env.num_cells))
    for ci, key in enumerate(env.cell_keys):
        I[target_cells[key], ci] = float(ratios[ci]) ** (1 / pf)

    # exact isometry certificate: ||I(sum a_R 1_R)||^p = sum |a_R|^p (mu0/mu1) mu1 = sum |a_R|^p mu0
    isometric = all(ratios[i] * m1[key] == env.weights[i] for i, key in enumerate(env.cell_keys))

    rng = rng_from_seed(seed + 2)
    cs = rng.standard_normal((samples, k))
    defect = 0.0
    for c in cs:
        f0 = env.basis @ c
        n0 = env.space.norm(f0, env.p)
        if n0 < 1e-12:
            continue
        through = I @ (env.xi @ c)
        direct = G @ c
        defect = max(defect, space1.norm(through - direct, env.p) / n0)
    return TransferResult(I, ratios, defect, isometric)
