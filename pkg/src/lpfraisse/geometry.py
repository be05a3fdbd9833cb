"""Gap (opening) metric between subspaces, Auerbach bases, and the
constructive gap-to-Banach-Mazur bridge.

The gap between unit balls is estimated from seeded sphere samples; lower
bounds come from certified distance-to-ball solves (closed form for p = 2,
linear programs for p in {1, inf}), and the reported upper bound adds an
explicit covering-mesh slack, never a claim of exactness.

Out of scope: the Kadets-style pseudometric that takes an infimum of the
gap over all isometric copies of the two subspaces; only direct gaps and a
Banach-Mazur upper estimator are provided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.spatial.distance

from lpfraisse.core import FLOAT_TOL, PIndex, norm_p, rng_from_seed
from lpfraisse.spaces import LinearMap, VectorP

CERTIFIED_GAP = 1e-6


class GapPreconditionError(ValueError):
    def __init__(self, gap_upper: float, needed: float):
        self.gap_upper = gap_upper
        self.needed = needed
        super().__init__(f"gap upper bound {gap_upper:.6g} exceeds required {needed:.6g}")


@dataclass(frozen=True)
class Subspace:
    ambient_n: int
    ambient_p: PIndex
    basis: np.ndarray  # (ambient_n, dim), columns are basis vectors

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != self.ambient_n:
            raise ValueError("basis must be ambient_n x dim")
        if np.linalg.matrix_rank(b) < b.shape[1]:
            raise ValueError("basis vectors must be linearly independent")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "ambient_p", PIndex.of(self.ambient_p))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def vector(self, coeffs: np.ndarray) -> VectorP:
        return VectorP(self.basis @ np.asarray(coeffs, dtype=float), self.ambient_p)

    def _normalize(self, pts: np.ndarray) -> np.ndarray:
        if self.ambient_p.is_inf:
            norms = np.max(np.abs(pts), axis=1)
        else:
            pf = float(self.ambient_p)
            norms = np.sum(np.abs(pts) ** pf, axis=1) ** (1 / pf)
        norms[norms == 0] = 1.0
        return pts / norms[:, None]

    def sphere_sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Random points on the unit sphere of the subspace, as ambient vectors."""
        cs = rng.standard_normal((count, self.dim))
        return self._normalize(cs @ self.basis.T)

    def sphere_grid(self, count: int) -> np.ndarray:
        """Deterministic quasi-uniform sphere points (smaller covering gaps
        than random draws): antipodes, equal angles, or a spiral grid."""
        k = self.dim
        if k == 1:
            cs = np.array([[1.0], [-1.0]])
        elif k == 2:
            th = np.linspace(0, 2 * np.pi, count, endpoint=False)
            cs = np.stack([np.cos(th), np.sin(th)], axis=1)
        elif k == 3:
            i = np.arange(count) + 0.5
            phi = np.arccos(1 - 2 * i / count)
            golden = np.pi * (1 + 5**0.5)
            th = golden * i
            cs = np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)
        else:
            cs = rng_from_seed(10_007).standard_normal((count, k))
            cs /= np.linalg.norm(cs, axis=1)[:, None]
        return self._normalize(cs @ self.basis.T)

    def to_json(self):
        return {
            "ambient_n": self.ambient_n,
            "ambient_p": self.ambient_p.to_json(),
            "basis": [list(map(float, self.basis[:, j])) for j in range(self.dim)],
        }

    @classmethod
    def from_json(cls, obj) -> "Subspace":
        basis = np.array(obj["basis"], dtype=float).T
        return cls(obj["ambient_n"], PIndex.from_json(obj["ambient_p"]), basis)


def _linprog(c, A_ub, b_ub, bounds):
    res = scipy.optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP failed: {res.message}")
    return res


def dist_to_unit_ball(x: VectorP, Y: Subspace, return_minimizer: bool = False):
    """min over the unit ball of Y of ||x - y|| in the ambient norm.

    Certified (closed form or LP optimum, gap <= 1e-6) for p in {1, 2, inf};
    multistart local solve, flagged by callers as best-effort, otherwise.
    """
    if len(x) != Y.ambient_n or x.p != Y.ambient_p:
        raise ValueError("ambient mismatch")
    B = Y.basis
    n, k = B.shape
    xe = x.entries
    p = Y.ambient_p

    if not p.is_inf and float(p) == 2:
        c, *_ = np.linalg.lstsq(B, xe, rcond=None)
        z = B @ c
        zn = float(np.linalg.norm(z))
        y = z if zn <= 1 else z / zn
        d = float(np.linalg.norm(xe - y))
        return (d, y) if return_minimizer else d

    if not p.is_inf and float(p) == 1:
        # vars: c (k, free), s (n, >=0), w (n, >=0); min sum s
        nv = k + 2 * n
        obj = np.concatenate([np.zeros(k), np.ones(n), np.zeros(n)])
        rows, rhs = [], []
        eye = np.eye(n)
        rows.append(np.hstack([-B, -eye, np.zeros((n, n))])); rhs.append(-xe)
        rows.append(np.hstack([B, -eye, np.zeros((n, n))])); rhs.append(xe)
        rows.append(np.hstack([B, np.zeros((n, n)), -eye])); rhs.append(np.zeros(n))
        rows.append(np.hstack([-B, np.zeros((n, n)), -eye])); rhs.append(np.zeros(n))
        rows.append(np.concatenate([np.zeros(k + n), np.ones(n)])[None, :]); rhs.append(np.array([1.0]))
        A = np.vstack(rows)
        b = np.concatenate(rhs)
        bounds = [(None, None)] * k + [(0, None)] * (2 * n)
        res = _linprog(obj, A, b, bounds)
        c = res.x[:k]
        y = B @ c
        d = float(res.fun)
        return (d, y) if return_minimizer else d

    if p.is_inf:
        # vars: c (k, free), t (>=0); min t
        rows, rhs = [], []
        rows.append(np.hstack([-B, -np.ones((n, 1))])); rhs.append(-xe)
        rows.append(np.hstack([B, -np.ones((n, 1))])); rhs.append(xe)
        rows.append(np.hstack([B, np.zeros((n, 1))])); rhs.append(np.ones(n))
        rows.append(np.hstack([-B, np.zeros((n, 1))])); rhs.append(np.ones(n))
        A = np.vstack(rows)
        b = np.concatenate(rhs)
        obj = np.concatenate([np.zeros(k), [1.0]])
        bounds = [(None, None)] * k + [(0, None)]
        res = _linprog(obj, A, b, bounds)
        y = B @ res.x[:k]
        d = float(res.fun)
        return (d, y) if return_minimizer else d

    # general p: smooth constrained solve from a few starts, feasibility by scaling
    pf = float(p)

    def _scale(c):
        z = B @ c
        nz = norm_p(z, p)
        return c / max(1.0, nz)

    def fun(c):
        return float(np.sum(np.abs(xe - B @ c) ** pf))

    cons = [{"type": "ineq", "fun": lambda c: 1.0 - np.sum(np.abs(B @ c) ** pf)}]
    best, best_c = np.inf, None
    rng = rng_from_seed(17)
    starts = [np.linalg.lstsq(B, xe, rcond=None)[0]] + [0.2 * rng.standard_normal(k) for _ in range(3)]
    for c0 in starts:
        r = scipy.optimize.minimize(fun, _scale(c0), method="SLSQP", constraints=cons,
                                    options={"maxiter": 200, "ftol": 1e-14})
        c = _scale(r.x)
        v = norm_p(xe - B @ c, p)
        if v < best:
            best, best_c = float(v), c
    y = B @ best_c
    return (best, y) if return_minimizer else best


@dataclass(frozen=True)
class GapEstimate:
    lower: float
    upper: float
    samples: int

    def __post_init__(self):
        if self.lower > self.upper + FLOAT_TOL:
            raise ValueError("lower must not exceed upper")


def gap_estimate(X: Subspace, Y: Subspace, budget: int = 64, seed: int = 0,
                 extra_points: np.ndarray | None = None) -> GapEstimate:
    """Hausdorff distance between unit balls, from sphere samples of each side.

    lower: best certified distance among sampled points (sound lower bound);
    upper: lower + 2 * measured covering mesh of the sample (honest slack,
    itself sampled -- see module docstring).
    """
    if X.dim != Y.dim or X.ambient_n != Y.ambient_n or X.ambient_p != Y.ambient_p:
        raise ValueError("dimension/ambient mismatch")
    rng = rng_from_seed(seed)
    lower = 0.0
    mesh = 0.0
    p = X.ambient_p
    euclid = not p.is_inf and float(p) == 2
    metric = "chebyshev" if p.is_inf else ("cityblock" if float(p) == 1 else "minkowski")
    for (A, B) in ((X, Y), (Y, X)):
        pts = A.sphere_grid(budget)
        if extra_points is not None and A is X:
            pts = np.vstack([pts, extra_points])
        if euclid:
            # batch closed form: project, scale into the ball, measure
            Bb = B.basis
            C = np.linalg.lstsq(Bb, pts.T, rcond=None)[0]
            Z = (Bb @ C).T
            zn = np.maximum(np.linalg.norm(Z, axis=1), 1.0)
            ys = Z / zn[:, None]
            lower = max(lower, float(np.max(np.linalg.norm(pts - ys, axis=1))))
        else:
            for v in pts:
                d = dist_to_unit_ball(VectorP(v, A.ambient_p), B)
                lower = max(lower, d)
        probes = A.sphere_sample(rng, 4 * budget)
        if metric == "minkowski":
            dd = scipy.spatial.distance.cdist(probes, pts, metric=metric, p=float(p))
        else:
            dd = scipy.spatial.distance.cdist(probes, pts, metric=metric)
        mesh = max(mesh, float(np.max(np.min(dd, axis=1))))
    return GapEstimate(lower, lower + 2 * mesh, budget)


def _dual_norm_argmax(g: np.ndarray, Y: Subspace) -> np.ndarray:
    """Coefficients c maximizing <g, c> over the coefficient body ||Bc||_p <= 1."""
    B = Y.basis
    n, k = B.shape
    p = Y.ambient_p
    if not p.is_inf and float(p) == 2:
        G = B.T @ B
        ci = np.linalg.solve(G, g)
        return ci / np.sqrt(g @ ci)
    if p.is_inf:
        A = np.vstack([B, -B])
        b = np.ones(2 * n)
        res = _linprog(-g, A, b, [(None, None)] * k)
        return res.x
    if float(p) == 1:
        # vars c, w; max g.c s.t. Bc <= w, -Bc <= w, sum w <= 1
        obj = np.concatenate([-g, np.zeros(n)])
        eye = np.eye(n)
        A = np.vstack([
            np.hstack([B, -eye]),
            np.hstack([-B, -eye]),
            np.concatenate([np.zeros(k), np.ones(n)])[None, :],
        ])
        b = np.concatenate([np.zeros(2 * n), [1.0]])
        res = _linprog(obj, A, b, [(None, None)] * k + [(0, None)] * n)
        return res.x[:k]

    # finite p > 1: stationarity g = lam * B^T diag(|z|^{p-2}) B c is an IRLS
    # fixed point; iterate reweighted solves from a couple of starts
    pf = float(p)
    rng = rng_from_seed(23)
    best, best_c = -np.inf, None
    G0 = B.T @ B
    for c0 in [np.linalg.solve(G0 + 1e-12 * np.eye(k), g), rng.standard_normal(k)]:
        c = c0 / max(norm_p(B @ c0, p), 1e-12)
        for _ in range(60):
            z = B @ c
            w = np.abs(z) ** (pf - 2) + 1e-12
            try:
                c_new = np.linalg.solve(B.T @ (w[:, None] * B), g)
            except np.linalg.LinAlgError:
                break
            c_new = c_new / max(norm_p(B @ c_new, p), 1e-12)
            if np.linalg.norm(c_new - c) < 1e-13:
                c = c_new
                break
            c = c_new
        if g @ c > best:
            best, best_c = float(g @ c), c
    return best_c


@dataclass(frozen=True)
class AuerbachResult:
    vectors: np.ndarray  # (ambient_n, dim), normalized basis
    defect: float        # worst violation of max_j |a_j| <= ||sum a_j x_j||, 0 when clean
    approximate: bool


def auerbach_basis(X: Subspace, restarts: int = 16, seed: int = 0,
                   check_samples: int = 2000, ascent_rounds: int = 30) -> AuerbachResult:
    """Normalized basis with norm-one biorthogonal functionals.

    Found by maximizing |det| of the coefficient matrix over the unit sphere
    (max-volume bases are Auerbach) with seeded multistart coordinate ascent;
    the defining inequality is then verified on a sampled coefficient grid
    and the worst defect reported.
    """
    k = X.dim
    rng = rng_from_seed(seed)
    if k == 1:
        v = X.basis[:, 0]
        v = v / norm_p(v, X.ambient_p)
        return AuerbachResult(v[:, None], 0.0, False)

    best_det, best_C = 0.0, None
    for _ in range(restarts):
        C = rng.standard_normal((k, k))
        for j in range(k):
            C[:, j] /= norm_p(X.basis @ C[:, j], X.ambient_p)
        for _ in range(ascent_rounds):
            improved = False
            for j in range(k):
                minor = np.delete(C, j, axis=1)
                cof = np.array([
                    (-1) ** (i + j) * np.linalg.det(np.delete(minor, i, axis=0))
                    for i in range(k)
                ])
                if np.all(cof == 0):
                    continue
                for gg in (cof, -cof):
                    cand = _dual_norm_argmax(gg, X)
                    Cc = C.copy()
                    Cc[:, j] = cand
                    if abs(np.linalg.det(Cc)) > abs(np.linalg.det(C)) + 1e-12:
                        C = Cc
                        improved = True
            if not improved:
                break
        d = abs(np.linalg.det(C))
        if d > best_det:
            best_det, best_C = d, C

    vecs = X.basis @ best_C
    for j in range(k):
        vecs[:, j] /= norm_p(vecs[:, j], X.ambient_p)
    # verify max_j |a_j| <= ||sum a_j x_j|| on a sampled grid
    coeffs = rng.standard_normal((check_samples, k))
    coeffs /= np.max(np.abs(coeffs), axis=1)[:, None]
    worst = 0.0
    for a in coeffs:
        v = vecs @ a
        nv = norm_p(v, X.ambient_p)
        worst = max(worst, np.max(np.abs(a)) / nv if nv > 0 else np.inf)
    defect = max(0.0, worst - 1.0)
    return AuerbachResult(vecs, defect, defect > CERTIFIED_GAP)


@dataclass(frozen=True)
class BmBridge:
    theta: LinearMap          # coefficient action from the Auerbach basis of X to Y points
    x_points: np.ndarray      # (n, k) Auerbach basis vectors
    y_points: np.ndarray      # (n, k) matched ball points of Y
    displacement: float       # max_j ||x_j - y_j||
    bound: float              # certified log(||theta|| ||theta^-1||) bound
    gap: GapEstimate


def bm_from_gap(X: Subspace, Y: Subspace, budget: int = 64, seed: int = 0) -> BmBridge:
    """Isomorphism theta: x_j -> y_j built from an Auerbach basis and nearest
    ball points, with the certified Banach-Mazur bound log(|theta||theta^-1|)
    <= 4k * Lambda_upper valid whenever the measured gap is below 1/(2k).
    """
    k = X.dim
    au = auerbach_basis(X, seed=seed)
    xs = au.vectors
    gap = gap_estimate(X, Y, budget=budget, seed=seed, extra_points=xs.T)
    if gap.upper > 1 / (2 * k):
        raise GapPreconditionError(gap.upper, 1 / (2 * k))
    ys = np.zeros_like(xs)
    dmax = 0.0
    for j in range(k):
        d, y = dist_to_unit_ball(VectorP(xs[:, j], X.ambient_p), Y, return_minimizer=True)
        ys[:, j] = y
        dmax = max(dmax, norm_p(xs[:, j] - y, X.ambient_p))
    kd = k * dmax * (1 + au.defect)
    if kd >= 1:
        raise GapPreconditionError(gap.upper, 1 / (2 * k))
    bound = float(np.log((1 + kd) / (1 - kd)))
    theta = LinearMap(ys, X.ambient_p, Y.ambient_p)  # columns = images of the Auerbach basis
    return BmBridge(theta, xs, ys, dmax, bound, gap)


def bm_upper_estimate(X: Subspace, Y: Subspace, seed: int = 0, tries: int = 32) -> float:
    """Upper-bound estimator for the Banach-Mazur pseudometric via random +
    local search over invertible coefficient maps.  Estimate only; exact
    d_BM is out of scope.
    """
    if X.dim != Y.dim:
        raise ValueError("dimension mismatch")
    k = X.dim
    rng = rng_from_seed(seed)
    samples = rng.standard_normal((256, k))

    def distortion_of(M):
        vals = []
        for a in samples:
            vx = norm_p(X.basis @ a, X.ambient_p)
            vy = norm_p(Y.basis @ (M @ a), Y.ambient_p)
            if vx > 1e-12:
                vals.append(vy / vx)
        vals = np.array(vals)
        return float(np.log(np.max(vals) / np.min(vals)))

    best = np.inf
    for _ in range(tries):
        M0 = np.eye(k) + 0.1 * rng.standard_normal((k, k))
        r = scipy.optimize.minimize(lambda v: distortion_of(v.reshape(k, k)), M0.ravel(),
                                    method="Nelder-Mead", options={"maxiter": 2000})
        best = min(best, float(r.fun))
    return best
