import os
import random
import sys
import unittest
from itertools import product
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parents[1] / "src"))

from autloop.core.constructions import (
    BetaMap,
    PhiFamily,
    beta_lie_algebra,
    beta_loop,
    example1_loop,
    example2_beta,
    example2_loop,
    fixed_vector_witness,
    lie_left_division,
    lie_to_loop,
    nuclear_semidirect,
    phi_from_beta,
    predicted_center,
    random_beta,
    random_square_zero_family,
    u_isomorphism_check,
    validate_phi_family,
)
from autloop.core.errors import (
    BadSubfield,
    DegenerateX,
    NonCommutingBeta,
    NotInjective,
    PhiConditionError,
    SingularIdPlusBeta,
    UnitInImage,
    UnsupportedParams,
    W1Violation,
    XSquareNonzero,
)
from autloop.core.gf2 import BitMatrix, FieldF2m
from autloop.core.lie import (
    LieAlgebraF2,
    abelian,
    check_W2,
    free_nilpotent,
    heisenberg,
    jacobi_failure,
    series,
)
from autloop.core.loops import is_automorphic

N = BitMatrix.from_rows([[0, 1], [0, 0]])
A = BitMatrix.from_rows([[0, 1], [1, 1]])


def assert_cal2(case, Q):
    p = Q.predicates
    case.assertTrue(p.commutative)
    case.assertTrue(p.exponent2)
    case.assertTrue(is_automorphic(Q, "direct"))
    case.assertTrue(is_automorphic(Q, "section_conjugation"))


class TestLieLoop(unittest.TestCase):
    def test_abelian_is_xor_group(self):
        Q = lie_to_loop(abelian(3))
        idx = np.arange(8)
        self.assertTrue(np.array_equal(Q.table, idx[:, None] ^ idx[None, :]))

    def test_heisenberg(self):
        Q = lie_to_loop(heisenberg())
        self.assertEqual(Q.order, 8)
        self.assertTrue(Q.predicates.associative)

    def test_w1_violation(self):
        with self.assertRaises(W1Violation):
            lie_to_loop(LieAlgebraF2(2, {(0, 1): 0b10}))

    def test_left_division(self):
        L = free_nilpotent(2, 3)
        Q = lie_to_loop(L)
        for x, z in product(range(0, 32, 3), range(32)):
            self.assertEqual(lie_left_division(L, x, z), int(Q.left_division[x, z]))

    def test_w2_implies_automorphic(self):
        for L in (heisenberg(), free_nilpotent(2, 3), free_nilpotent(2, 2)):
            self.assertTrue(check_W2(L))
            assert_cal2(self, lie_to_loop(L))


class TestPhi(unittest.TestCase):
    def test_identity_family(self):
        phi = validate_phi_family(PhiFamily.identity(2, 1))
        Q = nuclear_semidirect(phi)
        self.assertTrue(Q.predicates.associative)
        idx = np.arange(8)
        self.assertTrue(np.array_equal(Q.table, idx[:, None] ^ idx[None, :]))

    def test_from_example2(self):
        validate_phi_family(phi_from_beta(example2_beta(2, 1)))

    def test_symmetry_violation(self):
        ident = BitMatrix.identity(2)
        maps = {(i, j): ident for i in range(4) for j in range(4)}
        maps[(1, 2)] = A
        with self.assertRaises(PhiConditionError) as ctx:
            validate_phi_family(PhiFamily(2, 2, maps))
        self.assertEqual(ctx.exception.condition, "symmetry")

    def test_automorphism_violation(self):
        phi = PhiFamily.identity(2, 1)
        phi.maps[(1, 1)] = BitMatrix.zero(2)
        with self.assertRaises(PhiConditionError) as ctx:
            validate_phi_family(phi)
        self.assertEqual(ctx.exception.condition, "automorphism")

    def test_center_formula(self):
        beta = BetaMap(2, 1, (N,))
        Q = nuclear_semidirect(phi_from_beta(beta))
        phi = phi_from_beta(beta)
        size = 2
        fixed = [a for a in range(4) if all(phi.phi(j, k).apply(a) == a for j in range(size) for k in range(size))]
        trivial = [i for i in range(size) if all(phi.phi(i, j).is_identity() for j in range(size))]
        expected = tuple(sorted(a | (i << 2) for a in fixed for i in trivial))
        self.assertEqual(Q.nuclei.center, expected)


class TestBeta(unittest.TestCase):
    def test_zero_beta_is_group(self):
        Q = beta_loop(BetaMap.zero(2, 1))
        self.assertTrue(Q.predicates.associative)
        self.assertEqual(predicted_center(BetaMap.zero(2, 1)).elements(), tuple(range(8)))

    def test_example2_product(self):
        Q = beta_loop(example2_beta(2, 1))
        # (1 + 1)(w + 1) = w + 0 with w = x in GF(4)
        self.assertEqual(int(Q.table[0b101, 0b110]), 0b010)

    def test_singular_sum(self):
        with self.assertRaises(SingularIdPlusBeta) as ctx:
            beta_loop(BetaMap(2, 2, (A, A @ A)))
        self.assertEqual(ctx.exception.element, 0b11)

    def test_non_commuting(self):
        B = BitMatrix.from_rows([[0, 0], [1, 0]])
        with self.assertRaises(NonCommutingBeta) as ctx:
            beta_loop(BetaMap(2, 2, (N, B)))
        self.assertEqual(ctx.exception.pair, (0, 1))

    def test_predicted_center(self):
        beta = BetaMap(2, 1, (N,))
        pc = predicted_center(beta)
        self.assertEqual(pc.h_part, (0, 1))
        # N^2 = 0 makes the loop an abelian group although ker N is a line
        self.assertEqual(pc.elements(), tuple(range(8)))
        self.assertEqual(beta_loop(beta).nuclei.center, pc.elements())
        self.assertEqual(predicted_center(example2_beta(2, 1)).elements(), (0,))

    def test_predicted_center_shift(self):
        shift = BitMatrix.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        beta = BetaMap(3, 1, (shift,))
        pc = predicted_center(beta)
        self.assertEqual(pc.h_part, (0,))
        self.assertEqual(pc.elements(), (0, 1, 2, 3))
        self.assertEqual(beta_loop(beta).nuclei.center, (0, 1, 2, 3))

    def test_random_betas(self):
        rng = random.Random(7)
        for k, h in ((2, 1), (3, 2), (2, 2), (3, 1)):
            beta = random_beta(k, h, rng)
            Q = beta_loop(beta)
            assert_cal2(self, Q)
            self.assertEqual(Q.nuclei.center, predicted_center(beta).elements())
            self.assertTrue(u_isomorphism_check(beta))

    def test_u_isomorphism(self):
        self.assertTrue(u_isomorphism_check(BetaMap.zero(2, 1)))
        self.assertTrue(u_isomorphism_check(example2_beta(2, 1)))

    def test_bracket_identity(self):
        rng = random.Random(3)
        for _ in range(10):
            beta = random_beta(3, 2, rng)
            L = beta_lie_algebra(beta)
            self.assertIsNone(jacobi_failure(L))
            self.assertLessEqual(series(L).derived_dims[-1], 0)
            for x, y in product(range(1 << L.dim), repeat=2):
                self.assertEqual(L.bracket_bits(x, y) >> 3, 0)
        B = BitMatrix.from_rows([[0, 0], [1, 0]])
        self.assertIsNotNone(jacobi_failure(beta_lie_algebra(BetaMap(2, 2, (N, B)))))


class TestFieldExamples(unittest.TestCase):
    def test_example1_errors(self):
        F = FieldF2m.standard(2)
        with self.assertRaises(NotInjective):
            example1_loop(F, BitMatrix.from_columns([0], 2))
        with self.assertRaises(UnitInImage):
            example1_loop(F, BitMatrix.from_columns([1], 2))

    def test_example1_matches_example2(self):
        F = FieldF2m.standard(2)
        Q1 = example1_loop(F, BitMatrix.from_columns([2], 2))
        self.assertEqual(Q1, example2_loop(2, 1))

    def test_example1_random_deltas_gf16(self):
        F = FieldF2m.standard(4)
        for seed in range(3):
            rng = random.Random(seed)
            while True:
                c1, c2 = rng.getrandbits(4), rng.getrandbits(4)
                # injective and 1 outside the image
                if 0 not in (c1, c2, c1 ^ c2) and 1 not in (c1, c2, c1 ^ c2):
                    break
            Q = example1_loop(F, BitMatrix.from_columns([c1, c2], 4))
            self.assertEqual(Q.order, 64)
            self.assertEqual(Q.nuclei.center, (0,))
            assert_cal2(self, Q)

    def test_example2(self):
        Q = example2_loop(2, 1)
        self.assertEqual(Q.order, 8)
        self.assertFalse(Q.predicates.associative)
        self.assertEqual(Q.nuclei.center, (0,))
        assert_cal2(self, Q)

    def test_example2_order_64(self):
        Q = example2_loop(4, 2)
        self.assertEqual(Q.order, 64)
        self.assertEqual(Q.nuclei.center, (0,))

    def test_bad_subfield(self):
        with self.assertRaises(BadSubfield):
            example2_loop(4, 3)
        with self.assertRaises(BadSubfield):
            example2_loop(2, 2)


class TestFixedVector(unittest.TestCase):
    def test_degenerate(self):
        with self.assertRaises(DegenerateX):
            fixed_vector_witness([BitMatrix.zero(2)], [[BitMatrix.zero(2)]])

    def test_square_nonzero(self):
        B = BitMatrix.from_rows([[0, 0], [1, 0]])
        with self.assertRaises(XSquareNonzero):
            fixed_vector_witness([N, B], [[N]])

    def test_shape_mismatch(self):
        wide = BitMatrix.from_rows([[0, 1, 0], [0, 0, 0]])
        with self.assertRaises(UnsupportedParams):
            fixed_vector_witness([N, wide], [[N]])
        with self.assertRaises(UnsupportedParams):
            fixed_vector_witness([N], [[BitMatrix.zero(3)]])

    def test_order_8(self):
        Q, a = fixed_vector_witness([N], [[N]])
        self.assertEqual(Q.order, 8)
        self.assertEqual(a, 0b01)
        self.assertIn(a, Q.nuclei.center)
        self.assertGreater(len(Q.nuclei.center), 1)
        assert_cal2(self, Q)

    def test_random(self):
        rng = random.Random(2)
        for k, h in ((2, 1), (3, 1), (4, 1), (3, 2)):
            X, m = random_square_zero_family(k, h, rng)
            Q, a = fixed_vector_witness(X, m)
            self.assertNotEqual(a, 0)
            self.assertIn(a, Q.nuclei.center)


@unittest.skipUnless(os.environ.get("AUTLOOP_SLOW_TESTS") == "1", "set AUTLOOP_SLOW_TESTS=1")
class TestBatches(unittest.TestCase):
    def test_hundred_betas(self):
        rng = random.Random(100)
        shapes = [(k, h) for k in range(1, 5) for h in range(1, 4)]
        for n in range(100):
            beta = random_beta(*shapes[n % len(shapes)], rng)
            self.assertTrue(u_isomorphism_check(beta))
            Q = beta_loop(beta)
            self.assertEqual(Q.nuclei.center, predicted_center(beta).elements())

    def test_fifty_fixed_vector(self):
        rng = random.Random(50)
        for n in range(50):
            X, m = random_square_zero_family(2 + n % 3, 1 + n % 2, rng)
            Q, a = fixed_vector_witness(X, m)
            self.assertIn(a, Q.nuclei.center)
            self.assertGreater(len(Q.nuclei.center), 1)


if __name__ == '__main__':
    unittest.main()
