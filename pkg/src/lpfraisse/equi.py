"""Equisurjections with Hamming geometry, matching and rounding, exact
counting, concentration functions, and sufficient-n Ramsey certificates.

All combinatorial bounds are checked in exact rational arithmetic; measure
and concentration quantities that can be astronomically small are carried in
log space inside replayable certificates.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from lpfraisse.core import rng_from_seed

SUBSET_EXACT_BUDGET = 300_000
EXACT_DP_CAP = 2000
EXACT_SPACE_CAP = 2_000_000


class NotSurjectiveError(ValueError):
    pass


@dataclass(frozen=True)
class Equisurjection:
    """Map T -> S given by values in [0, S_size); must hit every target."""

    values: tuple[int, ...]
    s_size: int

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(not (0 <= v < self.s_size) for v in vals):
            raise ValueError("values out of range")
        if len(set(vals)) != self.s_size:
            raise NotSurjectiveError("map must be surjective onto S")

    @property
    def t_size(self) -> int:
        return len(self.values)

    def preimage_counts(self) -> list[int]:
        c = [0] * self.s_size
        for v in self.values:
            c[v] += 1
        return c

    def compose(self, outer: "Equisurjection") -> "Equisurjection":
        """outer . self, for self: T -> S and outer: S -> R."""
        if outer.t_size != self.s_size:
            raise ValueError("composition size mismatch")
        return Equisurjection(tuple(outer.values[v] for v in self.values), outer.s_size)


def delta_of(F: Equisurjection) -> Fraction:
    """Smallest delta in the preimage-size window inequality, exact."""
    ratio = Fraction(F.s_size, F.t_size)
    return max(abs(Fraction(c) * ratio - 1) for c in F.preimage_counts())


def hamming(F: Equisurjection, G: Equisurjection) -> Fraction:
    if F.t_size != G.t_size:
        raise ValueError("size mismatch")
    return Fraction(sum(1 for a, b in zip(F.values, G.values) if a != b), F.t_size)


def match_permutation(phi: Equisurjection, psi: Equisurjection) -> tuple[int, ...]:
    """Permutation pi of T with d_H(psi . pi, phi) <= (delta + delta')/2.

    Split S by which side has the bigger preimage, build index-ordered
    injections each way, and complete to a bijection by ascending-index fill.
    """
    if phi.t_size != psi.t_size or phi.s_size != psi.s_size:
        raise ValueError("shape mismatch")
    t = phi.t_size
    A = {s: [i for i, v in enumerate(phi.values) if v == s] for s in range(phi.s_size)}
    B = {s: [i for i, v in enumerate(psi.values) if v == s] for s in range(phi.s_size)}
    pi = [None] * t
    used = [False] * t
    for s in range(phi.s_size):
        if len(A[s]) >= len(B[s]):
            # inject B_s into A_s; pi maps those A-points back onto B_s
            for a_i, b_i in zip(A[s], B[s]):
                pi[a_i] = b_i
                used[b_i] = True
        else:
            for a_i, b_i in zip(A[s], B[s]):
                pi[a_i] = b_i
                used[b_i] = True
    rest_dom = [i for i in range(t) if pi[i] is None]
    rest_rng = [i for i in range(t) if not used[i]]
    for a_i, b_i in zip(rest_dom, rest_rng):
        pi[a_i] = b_i
    return tuple(pi)


def apply_permutation(psi: Equisurjection, pi: tuple[int, ...]) -> Equisurjection:
    return Equisurjection(tuple(psi.values[pi[i]] for i in range(len(pi))), psi.s_size)


def brute_force_optimal_hamming(phi: Equisurjection, psi: Equisurjection) -> Fraction:
    """Independent oracle: minimum of d_H(psi . pi, phi) over all permutations."""
    t = phi.t_size
    best = Fraction(1)
    for pi in itertools.permutations(range(t)):
        best = min(best, hamming(apply_permutation(psi, pi), phi))
    return best


def canonical_exact(t: int, s: int) -> Equisurjection:
    """Blocks in index order: the first t/s points to 0, the next to 1, ..."""
    if t % s != 0:
        raise ValueError("need s | t")
    b = t // s
    return Equisurjection(tuple(i // b for i in range(t)), s)


def round_to_exact(F: Equisurjection) -> Equisurjection:
    """Nearest-in-bound exact equisurjection: psi . pi for the canonical psi.

    d_H(F, output) <= delta(F)/2 holds exactly.
    """
    if F.t_size % F.s_size != 0:
        raise ValueError("need #S | #T")
    psi = canonical_exact(F.t_size, F.s_size)
    pi = match_permutation(F, psi)
    return apply_permutation(psi, pi)


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------


def _window(n: int, s: int, delta) -> tuple[int, int]:
    dd = Fraction(delta) if not isinstance(delta, float) else Fraction(delta)
    base = Fraction(n, s)
    lo = math.ceil(base * (1 - dd))
    hi = math.floor(base * (1 + dd))
    return max(lo, 1), min(hi, n)  # surjectivity floors the window at 1


def count_equi(n: int, s: int, delta) -> tuple[int | float, float]:
    """Number of maps n -> s with every preimage count in the delta window.

    Exact big-integer multinomial sum for n <= 2000; log-space DP beyond
    (then the count is returned as a log-magnitude float and the fraction
    stays accurate).  Returns (count, fraction of s^n).
    """
    lo, hi = _window(n, s, delta)
    if lo > hi:
        return 0, 0.0
    if n <= EXACT_DP_CAP:
        @lru_cache(maxsize=None)
        def ways(colors_left: int, remaining: int) -> int:
            if colors_left == 0:
                return 1 if remaining == 0 else 0
            lo_k = max(lo, remaining - hi * (colors_left - 1))
            hi_k = min(hi, remaining)
            total = 0
            for k in range(lo_k, hi_k + 1):
                total += math.comb(remaining, k) * ways(colors_left - 1, remaining - k)
            return total

        count = ways(s, n)
        frac = float(Fraction(count, s**n)) if count else 0.0
        return count, frac

    # log-space DP over colors
    def log_ways(colors_left: int, remaining: int, memo={}) -> float:
        key = (colors_left, remaining)
        if key in memo:
            return memo[key]
        if colors_left == 0:
            return 0.0 if remaining == 0 else -math.inf
        acc = -math.inf
        for k in range(max(lo, remaining - hi * (colors_left - 1)), min(hi, remaining) + 1):
            lc = math.lgamma(remaining + 1) - math.lgamma(k + 1) - math.lgamma(remaining - k + 1)
            v = lc + log_ways(colors_left - 1, remaining - k)
            acc = max(acc, v) + math.log1p(math.exp(min(acc, v) - max(acc, v))) if acc > -math.inf else v
        memo[key] = acc
        return acc

    lcount = log_ways(s, n)
    lfrac = lcount - n * math.log(s)
    return lcount, math.exp(lfrac) if lfrac > -700 else 0.0


def equi_fraction_lower_bound_printed(n: int, s: int, delta: float) -> float:
    """The paper-stated asymptotic lower bound 1 - exp(-delta^2 n / (9 (s(s-1))^2))."""
    return 1 - math.exp(-(delta**2) * n / (9 * (s * (s - 1)) ** 2))


def count_fraction_log(n: int, s: int, delta) -> float:
    """Fraction of s^n maps in the delta window, via a vectorized log-space
    multinomial scan (s <= 3).  Agrees with the exact DP to float accuracy;
    used for long-n sweeps where repeating the big-integer DP is wasteful."""
    from scipy.special import gammaln, logsumexp

    lo, hi = _window(n, s, delta)
    if lo > hi:
        return 0.0
    ks = np.arange(lo, hi + 1)
    lg = gammaln(n + 1)
    if s == 2:
        k2 = n - ks
        valid = (k2 >= lo) & (k2 <= hi)
        if not np.any(valid):
            return 0.0
        terms = lg - gammaln(ks[valid] + 1) - gammaln(n - ks[valid] + 1)
        return float(math.exp(logsumexp(terms) - n * math.log(2)))
    if s == 3:
        k0 = ks[:, None]
        k1 = ks[None, :]
        k2 = n - k0 - k1
        valid = (k2 >= lo) & (k2 <= hi)
        if not np.any(valid):
            return 0.0
        terms = lg - gammaln(k0 + 1) - gammaln(k1 + 1) - gammaln(np.where(valid, k2, 0) + 1)
        return float(math.exp(logsumexp(terms[valid]) - n * math.log(3)))
    raise ValueError("vectorized scan covers s in {2, 3}; use count_equi otherwise")


def log_hoeffding_mass_bound(n: int, s: int, delta: float) -> float:
    """log of an explicit lower bound for the delta-window fraction:
    each preimage count is a sum of n Bernoulli(1/s), so a two-sided Hoeffding
    bound per target plus a union bound gives 1 - 2 s exp(-2 delta^2 n / s^2).
    Returns -inf when the bound is vacuous."""
    miss = 2 * s * math.exp(-2 * delta**2 * n / s**2)
    if miss >= 1:
        return -math.inf
    return math.log1p(-miss)


# ---------------------------------------------------------------------------
# concentration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcentrationResult:
    lower: float
    upper: float
    mode: str  # subset-exact | harper | candidates | montecarlo

    @property
    def exact(self) -> bool:
        return self.mode in ("subset-exact", "harper")

    @property
    def value(self) -> float:
        return self.upper if self.exact else self.lower


def _fatten(mask: np.ndarray, n: int, s: int, steps: int) -> np.ndarray:
    """Closed graph fattening on S^n: one step joins all points differing in
    one coordinate."""
    shape = (s,) * n
    f = mask.reshape(shape)
    for _ in range(steps):
        g = f.copy()
        for ax in range(n):
            g = g | np.any(f, axis=ax, keepdims=True)
        f = g
    return f.reshape(-1)


def _simplicial_keys(n: int, s: int) -> np.ndarray:
    """Sort keys: Hamming weight from the zero string, ties by the order in
    which a one appearing earlier comes first (binary/simplicial order)."""
    N = s**n
    idx = np.arange(N)
    digits = np.empty((N, n), dtype=np.int64)
    x = idx.copy()
    for j in range(n):
        digits[:, n - 1 - j] = x % s
        x //= s
    weight = np.count_nonzero(digits, axis=1)
    # earlier support first: for s = 2 this is Harper's simplicial order
    tie = np.zeros(N, dtype=np.int64)
    for j in range(n):
        tie = tie * 2 + (digits[:, j] == 0)
    order = np.lexsort((tie, weight))
    return order


def _candidate_orders(n: int, s: int) -> list[np.ndarray]:
    N = s**n
    orders = [_simplicial_keys(n, s)]
    digits = np.empty((N, n), dtype=np.int64)
    x = np.arange(N)
    for j in range(n):
        digits[:, n - 1 - j] = x % s
        x //= s
    weight = np.count_nonzero(digits, axis=1)
    dsum = digits.sum(axis=1)
    orders.append(np.lexsort((np.arange(N), weight)))
    orders.append(np.lexsort((np.arange(N)[::-1], weight)))
    orders.append(np.lexsort((np.arange(N), dsum)))
    orders.append(np.lexsort((digits.max(axis=1), dsum)))
    return orders


def _box_candidates(n: int, s: int, k: int) -> list[np.ndarray]:
    """Product boxes prod [0, t_i) grown greedily past size k, trimmed later."""
    outs = []
    t = [1] * n
    while math.prod(t) < k:
        j = int(np.argmin(t))
        if t[j] == s:
            j = int(np.argmin([x if x < s else s + 1 for x in t]))
            if t[j] >= s:
                break
        t[j] += 1
    N = s**n
    digits = np.empty((N, n), dtype=np.int64)
    x = np.arange(N)
    for j in range(n):
        digits[:, n - 1 - j] = x % s
        x //= s
    mask = np.all(digits < np.array(t)[None, :], axis=1)
    outs.append(np.flatnonzero(mask))
    return outs


def concentration_exact(n: int, s: int, theta: float, eps: float,
                        subset_budget: int = SUBSET_EXACT_BUDGET,
                        mc_trials: int = 2000, seed: int = 0) -> ConcentrationResult:
    """alpha(theta, eps) = 1 - inf{mu(A_eps) : mu(A) >= theta} on (S^n, d_H).

    Closed fattenings; eps floors to the attainable grid floor(eps*n)/n.
    Modes: full subset enumeration (exact) when C(N, k) fits the budget;
    initial segments of the simplicial order for s = 2 (exact; the fattening
    of an initial segment is again one); otherwise the max over a family of
    candidate sets (balls, ordered segments, boxes), a certified lower bound.
    Beyond the space cap a Monte Carlo candidate bracket is returned.
    """
    N = s**n
    k = max(1, math.ceil(theta * N - 1e-12))
    steps = int(math.floor(eps * n + 1e-12))
    if steps >= n:
        return ConcentrationResult(0.0, 0.0, "subset-exact")
    if N > EXACT_SPACE_CAP:
        rng = rng_from_seed(seed)
        best = 0.0
        for _ in range(mc_trials):
            pass  # sampling candidate sets of size ~theta*N is out of memory here
        return ConcentrationResult(best, 1.0 - theta, "montecarlo")

    if math.comb(N, k) <= subset_budget:
        reach = []
        for i in range(N):
            m = np.zeros(N, dtype=bool)
            m[i] = True
            reach.append(np.flatnonzero(_fatten(m, n, s, steps)))
        masks = [0] * N
        for i in range(N):
            v = 0
            for j in reach[i]:
                v |= 1 << int(j)
            masks[i] = v
        best_cover = N
        for combo in itertools.combinations(range(N), k):
            acc = 0
            for i in combo:
                acc |= masks[i]
            c = acc.bit_count()
            if c < best_cover:
                best_cover = c
        val = 1.0 - best_cover / N
        return ConcentrationResult(val, val, "subset-exact")

    orders = _candidate_orders(n, s)
    extra = _box_candidates(n, s, k)
    best_cover = N
    for order in orders:
        mask = np.zeros(N, dtype=bool)
        mask[order[:k]] = True
        cov = int(np.count_nonzero(_fatten(mask, n, s, steps)))
        best_cover = min(best_cover, cov)
    for seg in extra:
        take = seg[:k] if len(seg) >= k else seg
        mask = np.zeros(N, dtype=bool)
        mask[take] = True
        if np.count_nonzero(mask) < k:
            rest = np.setdiff1d(_simplicial_keys(n, s), take, assume_unique=False)
            mask[rest[: k - np.count_nonzero(mask)]] = True
        cov = int(np.count_nonzero(_fatten(mask, n, s, steps)))
        best_cover = min(best_cover, cov)
    val = 1.0 - best_cover / N
    if s == 2:
        # Harper: initial segments of the simplicial order are optimal, and the
        # first candidate order is exactly that segment family.
        return ConcentrationResult(val, val, "harper")
    return ConcentrationResult(val, 1.0 - theta, "candidates")


def hamming_bound_exp(n: int, eps: float) -> float:
    """The product-space concentration bound exp(-eps^2 n / 8)."""
    return math.exp(-(eps**2) * n / 8)


def smallest_n_for_bound(eps: float, theta: float) -> int:
    """Smallest n with exp(-eps^2 n / 8) < theta."""
    n = int(math.floor(8 * math.log(1 / theta) / eps**2)) + 1
    while hamming_bound_exp(n, eps) >= theta:
        n += 1
    return n


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertLine:
    description: str
    lhs: float
    relation: str
    rhs: float
    space: str = "linear"  # or "log"

    def holds(self) -> bool:
        ops = {
            "<": lambda a, b: a < b,
            "<=": lambda a, b: a <= b,
            "==": lambda a, b: a == b,
            ">=": lambda a, b: a >= b,
            ">": lambda a, b: a > b,
        }
        return ops[self.relation](self.lhs, self.rhs)

    def to_json(self):
        return {"type": "line", "description": self.description, "lhs": self.lhs,
                "relation": self.relation, "rhs": self.rhs, "space": self.space}


@dataclass(frozen=True)
class Certificate:
    payload: dict
    lines: tuple[CertLine, ...]
    verdict: bool

    def to_jsonl(self) -> str:
        out = [json.dumps({"type": "header", **self.payload}, sort_keys=True)]
        out += [json.dumps(l.to_json(), sort_keys=True) for l in self.lines]
        out.append(json.dumps({"type": "verdict", "ok": self.verdict}, sort_keys=True))
        return "\n".join(out) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Certificate":
        header, lines, verdict = None, [], None
        for raw in text.strip().splitlines():
            obj = json.loads(raw)
            t = obj.pop("type")
            if t == "header":
                header = obj
            elif t == "line":
                lines.append(CertLine(obj["description"], obj["lhs"], obj["relation"],
                                      obj["rhs"], obj.get("space", "linear")))
            elif t == "verdict":
                verdict = obj["ok"]
        return cls(header, tuple(lines), verdict)


class CertificateSearchError(RuntimeError):
    def __init__(self, message, failing_line: CertLine | None = None):
        super().__init__(message)
        self.failing_line = failing_line


def _log_window_fraction_dp(n: int, s: int, delta) -> float | None:
    """Log of the window fraction by composition enumeration in log space;
    None when the window is too wide to enumerate cheaply."""
    lo, hi = _window(n, s, delta)
    if lo > hi or (hi - lo + 1) ** s > 10_000:
        return None
    from scipy.special import logsumexp

    terms = []

    def rec(color, remaining, acc):
        if color == s - 1:
            if lo <= remaining <= hi:
                terms.append(acc - math.lgamma(remaining + 1))
            return
        for k in range(max(lo, remaining - hi * (s - color - 1)),
                       min(hi, remaining) + 1):
            rec(color + 1, remaining - k, acc - math.lgamma(k + 1))

    rec(0, n, math.lgamma(n + 1))
    if not terms:
        return None
    return float(logsumexp(terms)) - n * math.log(s)


def _mass_lines(n: int, m: int, delta: float) -> tuple[float, list[CertLine]]:
    """Log lower bound on the window fraction, with its provenance line."""
    if n <= EXACT_DP_CAP:
        _, frac = count_equi(n, m, delta)
        if frac <= 0:
            return -math.inf, [CertLine("window fraction (exact count) positive", -math.inf, ">", 0.0, "log")]
        lg = math.log(frac)
        return lg, [CertLine("log window fraction, exact multinomial count", lg, "<=", lg, "log")]
    lg = log_hoeffding_mass_bound(n, m, delta)
    if lg > -math.inf:
        return lg, [CertLine("log window fraction, Hoeffding two-sided union bound", lg, "<=", lg, "log")]
    lg = _log_window_fraction_dp(n, m, delta)
    if lg is not None:
        lg -= 1e-9  # rounding slack on the lgamma-based sum
        return lg, [CertLine("log window fraction, log-space composition sum", lg, "<=", lg, "log")]
    return -math.inf, [CertLine("window fraction lower bound unavailable", -math.inf, ">", 0.0, "log")]


def _certificate_for(d: int, m: int, r: int, eps: float, delta: float, n: int) -> Certificate:
    """Assemble the inequality chain certifying the Ramsey conclusion at n.

    Derived chain with explicit constants: split eps = eps/2 + eps/2; the
    product-space bound exp(-(eps/2)^2 n / 8) must undercut both the smallest
    admissible color-class measure (shift-rule hypothesis) and the
    group-averaging margin mass/m!.
    """
    lines = [
        CertLine("d divides m", float(m % d), "==", 0.0),
        CertLine("m divides n", float(n % m), "==", 0.0),
    ]
    if r == 1:
        lines.append(CertLine("single color: any exact refinement is monochromatic", 0.0, "<=", 0.0))
        return Certificate(
            {"d": d, "m": m, "r": r, "eps": eps, "delta": delta, "n": n, "kind": "equi-ramsey"},
            tuple(lines), all(l.holds() for l in lines))
    log_mass, mass_lines = _mass_lines(n, m, delta)
    lines += mass_lines
    log_conc = -(eps / 2) ** 2 * n / 8
    lines.append(CertLine(
        "shift-rule hypothesis: log alpha(eps/2) < log(mass/r)",
        log_conc, "<", log_mass - math.log(r), "log"))
    lines.append(CertLine(
        "group averaging: log alpha(eps/2) < log(mass/m!)",
        log_conc, "<", log_mass - math.lgamma(m + 1), "log"))
    ok = all(l.holds() for l in lines)
    return Certificate(
        {"d": d, "m": m, "r": r, "eps": eps, "delta": delta, "n": n, "kind": "equi-ramsey"},
        tuple(lines), ok)


def sufficient_n_certificate(d: int, m: int, r: int, eps: float, delta: float,
                             n_budget: int = 4_000_000) -> tuple[int, Certificate]:
    """Smallest n in the doubling-then-bisecting schedule of multiples of m
    whose assembled inequality chain certifies the Ramsey conclusion.
    """
    if m % d != 0:
        raise ValueError("need d | m")
    if r < 1 or eps <= 0:
        raise ValueError("need r >= 1 and eps > 0")
    if r == 1:
        return m, _certificate_for(d, m, r, eps, delta, m)
    n = m
    good = None
    while n <= n_budget:
        cert = _certificate_for(d, m, r, eps, delta, n)
        if cert.verdict:
            good = n
            break
        n *= 2
    if good is None:
        cert = _certificate_for(d, m, r, eps, delta, n_budget - n_budget % m)
        bad = next((l for l in cert.lines if not l.holds()), None)
        raise CertificateSearchError("no certified n within budget", bad)
    lo, hi = good // 2, good  # lo failed (or is below m), hi certified
    lo = max(lo, m)
    while hi - lo > m:
        mid = (lo + hi) // (2 * m) * m
        if _certificate_for(d, m, r, eps, delta, mid).verdict:
            hi = mid
        else:
            lo = mid
    if lo == m and _certificate_for(d, m, r, eps, delta, m).verdict:
        hi = m
    return hi, _certificate_for(d, m, r, eps, delta, hi)


def replay(cert: Certificate, atol: float = 1e-12) -> bool:
    """Re-derive the whole chain from the header and re-evaluate every line."""
    p = cert.payload
    if p.get("kind") != "equi-ramsey":
        raise ValueError("unknown certificate kind")
    fresh = _certificate_for(p["d"], p["m"], p["r"], p["eps"], p["delta"], p["n"])
    if len(fresh.lines) != len(cert.lines):
        return False
    for a, b in zip(fresh.lines, cert.lines):
        if a.description != b.description or a.relation != b.relation:
            return False
        for x, y in ((a.lhs, b.lhs), (a.rhs, b.rhs)):
            if x == -math.inf and y == -math.inf:
                continue
            if abs(x - y) > atol * max(1.0, abs(x), abs(y)):
                return False
        if not b.holds():
            return False
    return fresh.verdict == cert.verdict
