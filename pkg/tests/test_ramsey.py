import math

import numpy as np
import pytest
from fractions import Fraction

from lpfraisse.core import PIndex, rng_from_seed
from lpfraisse import equi, ramsey
from lpfraisse.ramsey import (
    SpreadVector, best_spread_dp, block_ambient, block_positions, block_vector,
    brute_force_spread, dual_ramsey_demo, dualize, enumerate_equi,
    exhaustive_ramsey_check, falsify_certificate, gamma_f_theta, is_rigid, is_unital,
    quo_check, rigid_enumerate, spread, spread_vector_search, unital_from_equipartition,
)
from lpfraisse.spaces import LampertiEmbedding


class TestSpread:
    def test_placement(self):
        a = SpreadVector(np.array([0.6, 0.4]))
        assert spread(a, [1, 3], 5) == pytest.approx([0, 0.6, 0, 0.4, 0])

    def test_block_positions(self):
        assert block_positions(2, 0) == [2, 4]
        a = SpreadVector(np.array([0.6, 0.4]))
        v = block_vector(a, 0, 1)
        assert v[2] == 0.6 and v[4] == 0.4

    def test_norm_preserved(self):
        a = SpreadVector(np.array([0.25, -0.5, 0.25]))
        v = spread(a, [0, 3, 7], 9)
        assert np.sum(np.abs(v)) == pytest.approx(1.0)

    def test_increasing_required(self):
        a = SpreadVector(np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            spread(a, [3, 1], 5)


class TestSpreadDP:
    def test_exact_recovery(self):
        a = SpreadVector(np.array([0.7, 0.3]))
        x = spread(a, [2, 5], 9)
        s, e = best_spread_dp(x, a)
        assert s == [2, 5] and e == 0.0

    def test_matches_brute_force(self):
        rng = rng_from_seed(1)
        for _ in range(30):
            N, k = 8, 3
            x = rng.normal(size=N)
            raw = np.abs(rng.normal(size=k)) + 0.05
            a = SpreadVector(raw / raw.sum())
            s, e = best_spread_dp(x, a)
            assert e == pytest.approx(brute_force_spread(x, a), abs=1e-12)

    def test_windows_respected(self):
        rng = rng_from_seed(2)
        a = SpreadVector(np.array([0.5, 0.5]))
        x = rng.normal(size=10)
        wins = [1, 4, 7, 9]
        s, e = best_spread_dp(x, a, wins)
        assert set(s) <= set(wins)
        assert e == pytest.approx(brute_force_spread(x, a, wins), abs=1e-12)

    def test_infeasible_windows(self):
        a = SpreadVector(np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            best_spread_dp(np.zeros(5), a, [2])


class TestSpreadSearch:
    def test_single_block(self):
        # sign flips alone: the equal alternating profile shifts one slot,
        # costing 2/k, so the sampled margin clears 0.5
        rep = spread_vector_search(1, 0.5, k_budget=6, seed=0, b_samples=40, descent_rounds=5)
        assert rep.verified_on_sample
        assert rep.worst_error < 0.5

    def test_two_blocks_reports_honestly(self):
        # k <= 6 cannot absorb the half-scale combinations; the search must
        # flag its best margin rather than claim success
        rep = spread_vector_search(2, 0.5, k_budget=6, seed=0, b_samples=60, descent_rounds=10)
        assert rep.witness_b is not None
        assert rep.verified_on_sample == (rep.worst_error < 0.5)
        assert rep.worst_error <= 1.0


class TestExhaustive:
    def test_single_color(self):
        res = exhaustive_ramsey_check(4, 2, 2, 1, 0.5, 0.0)
        assert res.decided and res.holds

    def test_n6_full_sweep(self):
        res = exhaustive_ramsey_check(6, 2, 2, 2, 0.5, 0.0)
        assert res.decided and res.holds
        assert res.colorings == 2**20

    def test_small_negative_case(self):
        # with a zero fattening radius and fine colorings the statement fails
        res = exhaustive_ramsey_check(4, 2, 2, 2, 0.0, 0.0)
        assert res.decided and not res.holds
        assert res.counterexample is not None

    def test_falsification_mode(self):
        res = exhaustive_ramsey_check(8, 2, 2, 2, 0.5, 0.0, budget=2**20,
                                      falsification_colorings=2000, seed=3)
        assert not res.decided
        assert res.holds  # no counterexample found


class TestCertificateFalsification:
    def test_certified_n_survives_hashed_colorings(self):
        n, cert = equi.sufficient_n_certificate(2, 2, 2, 0.6, 0.2)
        res = falsify_certificate(cert, colorings=20_000, seed=5, pool_per_member=64)
        assert res.holds


class TestUnital:
    def test_displayed_formula(self):
        g = unital_from_equipartition([[0, 1], [2, 3]])
        col = g.columns[0]
        assert [(e.k, e.sign, e.wpow) for e in col] == [(0, 1, Fraction(1, 2)), (1, 1, Fraction(1, 2))]
        assert is_unital(g)
        assert g.is_isometric()

    def test_distortion_isometric(self):
        from lpfraisse.spaces import distortion
        g = unital_from_equipartition([[0, 2], [1, 3], [4, 5]])
        rep = distortion(g)
        assert rep.certified and rep.delta == 0.0

    def test_unequal_parts_rejected(self):
        with pytest.raises(ValueError):
            unital_from_equipartition([[0], [1, 2]])


class TestRigid:
    def test_hand_enumeration(self):
        assert rigid_enumerate(3, 2) == [(0, 0, 1), (0, 1, 0), (0, 1, 1)]

    def test_single_target(self):
        assert rigid_enumerate(3, 1) == [(0, 0, 0)]

    def test_counting_oracle(self):
        for n in (2, 4, 6, 8):
            assert len(rigid_enumerate(n, 2)) == 2 ** (n - 1) - 1

    def test_too_small_domain(self):
        assert rigid_enumerate(2, 3) == []

    def test_closed_under_composition(self):
        for f in rigid_enumerate(5, 3):
            for g in rigid_enumerate(3, 2):
                comp = tuple(g[v] for v in f)
                assert is_rigid(comp)


class TestQuoDuality:
    def test_hand_transpose(self):
        # u_0 -> -u_1 into the plane: dual rows are (0, -u_0)
        g = gamma_f_theta([1], [-1], 2)
        sigma, section = dualize(g)
        assert sigma.matrix.tolist() == [[0.0, -1.0]]
        comp = sigma.matrix @ section.to_linear_map().matrix
        assert np.array_equal(comp, np.eye(1))

    def test_positive_lattice_chain(self):
        g = gamma_f_theta([0, 2], [1, 1], 3)
        sigma, _ = dualize(g)
        ok, off = quo_check(sigma.matrix, "lattice")
        assert ok and not off

    def test_violating_row(self):
        M = np.array([[0.5, 1.0, 0.0], [0.5, 0.0, 1.0]])
        ok, off = quo_check(M, "disjoint")
        assert not ok and 0 in off

    def test_section_identity_random(self):
        rng = rng_from_seed(7)
        for _ in range(20):
            d = int(rng.integers(1, 4))
            m = int(rng.integers(d, 6))
            f = sorted(rng.choice(m, size=d, replace=False).tolist())
            theta = [int(v) for v in rng.choice([-1, 1], size=d)]
            g = gamma_f_theta(f, theta, m)
            sigma, section = dualize(g)
            comp = sigma.matrix @ section.to_linear_map().matrix
            assert np.array_equal(comp, np.eye(d))


class TestDualRamseyDemo:
    def test_small_alphabets(self):
        for seed in range(4):
            rep = dual_ramsey_demo(2, 2, 2, seed=seed)
            assert rep.ok, rep

    def test_size_guard(self):
        with pytest.raises(ValueError):
            dual_ramsey_demo(3, 3, 2)


def test_enumerate_equi_windows():
    out = enumerate_equi(4, 2, 0.0)
    assert len(out) == 6
    out = enumerate_equi(4, 2, 0.5)
    assert len(out) == 14


class TestRamseyInstance:
    def test_transfer_carrier(self):
        from lpfraisse.mazur import transfer_ramsey_instance
        from lpfraisse.ramsey import RamseyInstance

        inst = RamseyInstance(3, 2, 4, 2, 0.1)
        out = transfer_ramsey_instance(inst, 1)
        assert float(out.p) == 1.0
        assert out.eps == pytest.approx(0.3)

    def test_certify_attaches_witness(self):
        from lpfraisse.ramsey import RamseyInstance

        inst = RamseyInstance(1, 2, 2, 2, 0.6, 0.2).certify()
        assert inst.witness_n is not None
        assert equi.replay(inst.certificate)

    def test_divisibility_invariant(self):
        from lpfraisse.ramsey import RamseyInstance

        with pytest.raises(ValueError):
            RamseyInstance(1, 3, 4, 2, 0.5)
