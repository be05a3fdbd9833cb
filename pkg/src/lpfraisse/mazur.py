"""Mazur maps between l_p and l_q spheres and transport of Ramsey instances.

The coordinatewise map x -> sign(x)|x|^(p/q) preserves supports and signs and
satisfies ||M(x)||_q^q = ||x||_p^p.  On structured embeddings it acts by
keeping the stored weight_pow data literally (|c|^p at p equals |c'|^q at q),
so the transform is exact on that representation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from lpfraisse.core import PIndex, norm_p, rng_from_seed, sphere_points
from lpfraisse.spaces import LampertiEmbedding, VectorP


@dataclass(frozen=True)
class MazurParams:
    p: PIndex
    q: PIndex

    def __post_init__(self):
        object.__setattr__(self, "p", PIndex.of(self.p))
        object.__setattr__(self, "q", PIndex.of(self.q))
        if self.p.is_inf or self.q.is_inf:
            raise ValueError("Mazur maps require finite p, q")

    @property
    def exponent(self) -> float:
        return float(self.p) / float(self.q)

    def inverse(self) -> "MazurParams":
        return MazurParams(self.q, self.p)


def mazur_map(x: VectorP, params: MazurParams) -> VectorP:
    """Coordinatewise sign(x)|x|^(p/q), sending the l_p sphere to the l_q sphere."""
    if x.p != params.p:
        raise ValueError(f"vector lives at {x.p}, params expect {params.p}")
    if params.p == params.q:
        return VectorP(x.entries.copy(), params.q)
    r = params.exponent
    out = np.sign(x.entries) * np.abs(x.entries) ** r
    return VectorP(out, params.q)


def mazur_map_exact(signs_pows: list[tuple[int, Fraction]], params: MazurParams) -> list[tuple[int, Fraction]]:
    """Exact mode on (sign, |entry|^p) data: the stored p-th powers carry over literally."""
    return [(s, Fraction(w)) for (s, w) in signs_pows]


def mazur_embedding(gamma: LampertiEmbedding, params: MazurParams) -> LampertiEmbedding:
    """Columnwise transport u_i -> M(gamma u_i); exact on stored weight data."""
    if gamma.p != params.p:
        raise ValueError(f"embedding lives at {gamma.p}, params expect {params.p}")
    if not gamma.is_isometric():
        raise ValueError("transport is defined for isometric structured embeddings")
    return replace(gamma, p=params.q)


_CPQ_SAMPLES = 4000
_CPQ_SAFETY = 1.1


def continuity_modulus(params: MazurParams, t, cpq: float | None = None):
    """tau_{p,q}(t): (p/q) t when p >= q, else c_{p,q} t^(p/q) with empirical c."""
    t = np.asarray(t, dtype=float)
    p, q = float(params.p), float(params.q)
    if p >= q:
        return (p / q) * t
    c = estimate_cpq(params) if cpq is None else cpq
    return c * t ** (p / q)


_cpq_cache: dict[tuple, float] = {}


def estimate_cpq(params: MazurParams, seed: int = 20_240_001, samples: int = _CPQ_SAMPLES) -> float:
    """Empirical constant for the p < q modulus: max observed ratio
    ||M(x)-M(y)||_q / ||x-y||_p^(p/q) over a seeded sphere sample, times a
    safety factor.  No closed form is available; certificates that depend on
    this value are stamped "empirical-constant".
    """
    key = (params.p, params.q, seed, samples)
    if key in _cpq_cache:
        return _cpq_cache[key]
    p, q = float(params.p), float(params.q)
    if p >= q:
        return p / q
    rng = rng_from_seed(seed)
    worst = 0.0
    for dim in (2, 3, 5, 8):
        xs = sphere_points(rng, samples, dim, params.p)
        ys = sphere_points(rng, samples, dim, params.p)
        # include nearby pairs, where the modulus bites
        ys[::2] = xs[::2] + 0.05 * rng.standard_normal((len(xs[::2]), dim))
        ys_n = np.sum(np.abs(ys) ** p, axis=1) ** (1 / p)
        ys = ys / ys_n[:, None]
        mx = np.sign(xs) * np.abs(xs) ** (p / q)
        my = np.sign(ys) * np.abs(ys) ** (p / q)
        num = np.sum(np.abs(mx - my) ** q, axis=1) ** (1 / q)
        den = np.sum(np.abs(xs - ys) ** p, axis=1) ** (1 / p)
        ok = den > 1e-12
        worst = max(worst, float(np.max(num[ok] / den[ok] ** (p / q))))
    val = worst * _CPQ_SAFETY
    _cpq_cache[key] = val
    return val


@dataclass(frozen=True)
class TransferredInstance:
    d: int
    m: int
    r: int
    eps: float
    p: PIndex
    q: PIndex
    eps_transferred: float
    empirical_constant: float | None
    warning: str | None = None

    def to_json(self):
        return {
            "d": self.d,
            "m": self.m,
            "r": self.r,
            "p": self.p.to_json(),
            "q": self.q.to_json(),
            "eps": self.eps,
            "eps_transferred": self.eps_transferred,
            "empirical_constant": self.empirical_constant,
            "warning": self.warning,
        }


def transfer_ramsey_instance(inst, q, seed: int = 20_240_001):
    """Typed form: move a whole instance carrier to exponent q (witness data
    does not transport; the certified n must be re-derived at the new error)."""
    from lpfraisse.ramsey import RamseyInstance

    t = transfer_instance(inst.d, inst.m, inst.r, inst.eps, inst.p, q, seed=seed)
    return RamseyInstance(t.q, inst.d, inst.m, inst.r, t.eps_transferred, inst.delta)


def transfer_instance(d: int, m: int, r: int, eps: float, p, q, seed: int = 20_240_001) -> TransferredInstance:
    """Move a Ramsey instance between exponents: same (d, m, r), the admitted
    error becomes tau_{p,q}(eps).  Witness families transport through
    mazur_embedding with the same modulus.
    """
    p, q = PIndex.of(p), PIndex.of(q)
    if p.is_inf or q.is_inf:
        raise ValueError("transfer requires finite p, q")
    warning = None
    if p == PIndex.of(2) or q == PIndex.of(2):
        warning = "exponent 2 is outside the transport hypothesis; result is formal"
    params = MazurParams(p, q)
    if p == q:
        return TransferredInstance(d, m, r, eps, p, q, eps, None, warning)
    pf, qf = float(p), float(q)
    if pf >= qf:
        return TransferredInstance(d, m, r, eps, p, q, (pf / qf) * eps, None, warning)
    c = estimate_cpq(params, seed=seed)
    return TransferredInstance(d, m, r, eps, p, q, c * eps ** (pf / qf), c, warning)
