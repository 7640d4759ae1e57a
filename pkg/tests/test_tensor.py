import unittest

import numpy as np

from neuron_resync.core.errors import PermutationError, ShapeError
from neuron_resync.core.permutation import Permutation, check_size, compose, inverse, matrix_view
from neuron_resync.core.tensor import as_tensor, cosine, cosine_matrix, matmul


class TestMatmul(unittest.TestCase):
    def test_small_product(self):
        a = np.array([[1, 2], [3, 4]], dtype=np.float32)
        b = np.array([[5, 6], [7, 8]], dtype=np.float32)
        np.testing.assert_array_equal(matmul(a, b), [[19, 22], [43, 50]])
        self.assertEqual(matmul(a, b).dtype, np.float32)

    def test_inner_dimension_mismatch(self):
        with self.assertRaises(ShapeError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))
        with self.assertRaises(ShapeError):
            matmul(np.ones(3), np.ones((3, 1)))

    def test_associative_within_tolerance(self):
        rng = np.random.default_rng(3)
        a, b, c = (rng.standard_normal((4, 4)).astype(np.float32) for _ in range(3))
        left = matmul(matmul(a, b), c)
        right = matmul(a, matmul(b, c))
        np.testing.assert_allclose(left, right, rtol=1e-4, atol=1e-5)

    def test_float64_operands_stay_float64(self):
        self.assertEqual(matmul(np.eye(2), np.eye(2)).dtype, np.float64)


class TestCosine(unittest.TestCase):
    def test_known_values(self):
        self.assertAlmostEqual(cosine([1, 0], [0, 1]), 0.0)
        self.assertAlmostEqual(cosine([1, 2], [2, 4]), 1.0)
        self.assertAlmostEqual(cosine([1, 2], [-1, -2]), -1.0)

    def test_zero_vector_scores_zero(self):
        self.assertEqual(cosine([0, 0, 0], [1, 2, 3]), 0.0)

    def test_length_mismatch(self):
        with self.assertRaises(ShapeError):
            cosine([1, 2], [1, 2, 3])

    def test_positive_scale_invariance(self):
        rng = np.random.default_rng(0)
        u, v = rng.standard_normal(10), rng.standard_normal(10)
        self.assertAlmostEqual(cosine(3.5 * u, 0.2 * v), cosine(u, v), places=12)
        self.assertAlmostEqual(cosine(-u, v), -cosine(u, v), places=12)

    def test_matrix_matches_pairwise(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((3, 5))
        b = rng.standard_normal((4, 5))
        b[2] = 0.0
        matrix = cosine_matrix(a, b)
        self.assertEqual(matrix.shape, (3, 4))
        for i in range(3):
            for j in range(4):
                self.assertAlmostEqual(matrix[i, j], cosine(a[i], b[j]), places=12)

    def test_as_tensor_rejects_non_finite(self):
        with self.assertRaises(ShapeError):
            as_tensor([1.0, float("nan")])
        with self.assertRaises(ShapeError):
            as_tensor([])
        self.assertEqual(as_tensor([[1, 2]]).dtype, np.float32)


class TestPermutation(unittest.TestCase):
    def test_rejects_non_bijection(self):
        for bad in ((0, 0, 1), (1, 2, 3), ()):
            with self.assertRaises(PermutationError):
                Permutation(bad)

    def test_rejects_non_integer_entries(self):
        for bad in ((1.9, 0.2), (1.0, 0.0), (True, False), ("1", "0")):
            with self.assertRaises(PermutationError):
                Permutation(bad)
        self.assertEqual(Permutation(tuple(np.array([1, 0]))).mapping, (1, 0))

    def test_matrix_view(self):
        p = Permutation((1, 2, 0))
        expected = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=np.float32)
        np.testing.assert_array_equal(matrix_view(p), expected)
        np.testing.assert_array_equal(matrix_view(p).T, matrix_view(inverse(p)))

    def test_matrix_view_moves_columns(self):
        p = Permutation((2, 0, 1))
        w = np.array([[10.0, 20.0, 30.0]])
        moved = w @ matrix_view(p)
        for i in range(3):
            self.assertEqual(moved[0, p[i]], w[0, i])

    def test_inverse(self):
        self.assertEqual(inverse(Permutation((1, 2, 0))).mapping, (2, 0, 1))
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = Permutation.random(9, rng)
            self.assertTrue(compose(p, inverse(p)).is_identity())
            self.assertTrue(compose(inverse(p), p).is_identity())

    def test_compose_order(self):
        p = Permutation((1, 2, 0))
        q = Permutation.swap(3, 0, 1)
        self.assertEqual(compose(p, q).mapping, (p[q[0]], p[q[1]], p[q[2]]))
        self.assertTrue(compose(q, q).is_identity())

    def test_size_checks(self):
        with self.assertRaises(PermutationError):
            compose(Permutation.identity(3), Permutation.identity(4))
        with self.assertRaises(PermutationError):
            check_size(Permutation.identity(3), 4, "layer 0")
        check_size(Permutation.identity(3), 3)


if __name__ == "__main__":
    unittest.main()
