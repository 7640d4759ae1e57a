import itertools
import unittest

import numpy as np

from neuron_resync.attack import (
    add_gaussian_noise,
    magnitude_prune,
    permute_layer,
    quantize,
    random_permutation,
    scalar_attack,
)
from neuron_resync.core.errors import ArchitectureMismatchError, PermutationError, ShapeError, ValidationError
from neuron_resync.core.permutation import Permutation, compose, inverse, matrix_view
from neuron_resync.core.types import Activation, MatchMethod, Stage
from neuron_resync.integrity import verify_integrity
from neuron_resync.model import build_mlp
from neuron_resync.resync import (
    assignment_score,
    baseline_norm_ranking,
    layer_similarity,
    match_neurons,
    output_cosine,
    pairwise_output_cosine,
    psi,
    recover_permutation,
    redundant_pairs,
    resync_model,
    similarity_matrix,
)
from tests.support import conv_setup, fc_bundle, mlp_setup

RELU, IDENTITY = Activation.RELU, Activation.IDENTITY
METHODS = tuple(MatchMethod)


def _permute_all(model, seed):
    perms = {}
    suspect = model
    for layer in range(model.depth - 1):
        perms[layer] = random_permutation(model.layers[layer].neurons, seed * 31 + layer)
        suspect = permute_layer(suspect, layer, perms[layer])
    return suspect, perms


class TestSimilarity(unittest.TestCase):
    def test_self_similarity_has_unit_diagonal(self):
        model = mlp_setup().model
        matrix = layer_similarity(model, model, 1)
        self.assertEqual(matrix.shape, (32, 32))
        np.testing.assert_allclose(np.diag(matrix), 1.0, atol=1e-12)

    def test_permuted_entries(self):
        model = mlp_setup().model
        perm = random_permutation(32, 3)
        matrix = layer_similarity(model, permute_layer(model, 0, perm), 0)
        for i in range(32):
            self.assertAlmostEqual(matrix[i, perm[i]], 1.0, places=12)

    def test_orthogonal_neurons(self):
        spec = build_mlp(0, widths=(4, 4, 2)).layers[0]
        weight = np.diag([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_allclose(similarity_matrix(spec, weight, weight), np.eye(4), atol=1e-12)

    def test_shape_and_architecture_checks(self):
        spec = build_mlp(0).layers[0]
        with self.assertRaises(ShapeError):
            similarity_matrix(spec, np.ones((8, 32)), np.ones((8, 31)))
        with self.assertRaises(ArchitectureMismatchError):
            layer_similarity(build_mlp(0), conv_setup().model, 0)


class TestMatching(unittest.TestCase):
    def test_recovers_planted_permutation(self):
        rng = np.random.default_rng(0)
        for method in METHODS:
            for _ in range(10):
                perm = Permutation.random(8, rng)
                self.assertEqual(recover_permutation(matrix_view(perm), method), perm)

    def test_identity_dominant_matrix(self):
        rng = np.random.default_rng(1)
        matrix = np.eye(6) + 0.1 * rng.random((6, 6))
        for method in METHODS:
            self.assertTrue(recover_permutation(matrix, method).is_identity())

    def test_exact_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            n = int(rng.integers(1, 7))
            matrix = rng.uniform(-1.0, 1.0, (n, n))
            best = max(
                float(matrix[np.arange(n), list(order)].sum()) for order in itertools.permutations(range(n))
            )
            exact = assignment_score(matrix, recover_permutation(matrix, MatchMethod.EXACT_ASSIGNMENT))
            greedy = assignment_score(matrix, recover_permutation(matrix, MatchMethod.GREEDY_GLOBAL))
            self.assertAlmostEqual(exact, best, places=12)
            self.assertLessEqual(greedy, exact + 1e-12)

    def test_row_argmax_collisions_fall_back(self):
        matrix = np.array([[0.9, 0.1, 0.0], [0.8, 0.2, 0.1], [0.0, 0.1, 0.7]])
        with self.assertLogs("neuron_resync.resync.matching", level="WARNING"):
            match = match_neurons(matrix, MatchMethod.ROW_ARGMAX)
        self.assertEqual(match.permutation.mapping, (0, 1, 2))
        self.assertEqual(match.duplicates, 2)

    def test_ties_take_lowest_index(self):
        match = match_neurons(np.ones((3, 3)))
        self.assertTrue(match.permutation.is_identity())
        self.assertEqual(match.ties, 3)
        self.assertEqual(match.margin, 0.0)

    def test_margin(self):
        matrix = np.array([[1.0, 0.2], [0.5, 0.9]])
        match = match_neurons(matrix)
        self.assertAlmostEqual(match.margin, 0.4)
        self.assertEqual(match.ties, 0)
        self.assertAlmostEqual(match_neurons(np.array([[0.3]])).margin, 1.3)

    def test_bad_matrices(self):
        with self.assertRaises(ShapeError):
            match_neurons(np.ones((2, 3)))
        with self.assertRaises(ValidationError):
            match_neurons(np.array([[1.0, np.nan], [0.0, 1.0]]))


class TestPsi(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(psi(Permutation((1, 0, 2)), Permutation((1, 0, 2))), 100.0)
        self.assertEqual(psi(Permutation((0, 1, 2, 3)), Permutation((1, 0, 2, 3))), 50.0)
        with self.assertRaises(PermutationError):
            psi(Permutation.identity(2), Permutation.identity(3))

    def test_invariant_under_common_relabelling(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            sigma, rho, tau = (Permutation.random(10, rng) for _ in range(3))
            self.assertEqual(psi(compose(sigma, tau), compose(rho, tau)), psi(sigma, rho))


class TestResyncModel(unittest.TestCase):
    def test_pure_permutation_is_fully_undone(self):
        for setup in (mlp_setup(), conv_setup()):
            model = setup.model
            for seed in range(100):
                suspect, perms = _permute_all(model, seed)
                fixed, report = resync_model(model, suspect, true_perms=perms)
                self.assertEqual(report.overall_psi, 100.0)
                self.assertTrue(fixed.bit_equal(model))

    def test_every_method_on_permuted_model(self):
        model = mlp_setup().model
        suspect, perms = _permute_all(model, 7)
        for method in METHODS:
            fixed, report = resync_model(model, suspect, method, true_perms=perms)
            self.assertEqual(report.overall_psi, 100.0)
            self.assertEqual(report.method, method)
            self.assertEqual([entry.layer for entry in report.layers], [0, 1])

    def test_unpermuted_suspect(self):
        model = mlp_setup().model
        fixed, report = resync_model(model, model)
        self.assertTrue(fixed.bit_equal(model))
        self.assertIsNone(report.overall_psi)
        for entry in report.layers:
            self.assertTrue(entry.permutation.is_identity())
            self.assertIsNone(entry.psi)
            self.assertGreater(entry.margin, 0.0)

    def test_missing_truth_counts_as_identity(self):
        model = mlp_setup().model
        perm = random_permutation(32, 5)
        _, report = resync_model(model, permute_layer(model, 1, perm), true_perms={1: perm})
        self.assertEqual(report.layer(0).psi, 100.0)
        self.assertEqual(report.layer(1).psi, 100.0)

    def test_mild_perturbations_still_resynchronize(self):
        model = mlp_setup().model
        for seed in range(5):
            suspect, perms = _permute_all(model, seed)
            for altered in (quantize(suspect, None, 8), add_gaussian_noise(suspect, None, 0.1, seed)):
                _, report = resync_model(model, altered, true_perms=perms)
                self.assertEqual(report.overall_psi, 100.0)
                for entry in report.layers:
                    self.assertGreater(entry.margin, 0.0)

    def test_full_recovery_keeps_positive_margin(self):
        model = mlp_setup().model
        for seed in range(10):
            perm = random_permutation(32, seed)
            suspect = permute_layer(model, 1, perm)
            variants = {
                "quant": quantize(suspect, 1, 8),
                "noise": add_gaussian_noise(suspect, 1, 0.1, seed),
                "prune": magnitude_prune(suspect, 1, 0.1),
            }
            for name, altered in variants.items():
                _, report = resync_model(model, altered, true_perms={1: perm})
                entry = report.layer(1)
                self.assertEqual(entry.psi, 100.0, name)
                self.assertGreater(entry.margin, 0.0, name)

    def test_architecture_mismatch(self):
        with self.assertRaises(ArchitectureMismatchError):
            resync_model(mlp_setup().model, build_mlp(0, widths=(8, 16, 4)))

    def test_scaled_neuron_survives_resync_and_is_flagged(self):
        model = mlp_setup().model
        for k in (0.05, 0.1, 0.5):
            perm = random_permutation(32, 9)
            attacked = scalar_attack(permute_layer(model, 1, perm), 1, 3, k)
            fixed, report = resync_model(model, attacked, true_perms={1: perm})
            self.assertEqual(report.overall_psi, 100.0)
            verdict = verify_integrity(model, fixed, 1)
            flagged = inverse(perm)[3]
            self.assertEqual(verdict.flagged(verdict.neurons[flagged].flag), [flagged])
            self.assertEqual(verdict.neurons[flagged].flag.value, "scaled")
            self.assertGreaterEqual(verdict.neurons[flagged].cosine, 1.0 - 1e-4)
            self.assertAlmostEqual(verdict.neurons[flagged].norm_ratio, 1.0 + k, delta=1e-6)


class TestNormBaseline(unittest.TestCase):
    def test_distinct_norms_pure_permutation(self):
        model = mlp_setup().model
        perm = random_permutation(32, 1)
        spec = model.layers[1]
        ranking = baseline_norm_ranking(spec, model.weight(1), permute_layer(model, 1, perm).weight(1))
        self.assertEqual(psi(perm, ranking.permutation), 100.0)
        self.assertEqual(ranking.ties, 0)

    def test_equal_norms_are_reported(self):
        spec = build_mlp(0, widths=(2, 3, 2)).layers[0]
        weight = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 2.0]])
        self.assertEqual(baseline_norm_ranking(spec, weight, weight).ties, 1)

    def test_ranking_breaks_under_perturbation_while_resync_holds(self):
        rng = np.random.default_rng(0)
        directions = rng.standard_normal((16, 32))
        directions /= np.abs(directions).sum(axis=0, keepdims=True)
        first = directions * (1.0 + 1e-5 * np.arange(32))[None, :]
        model = fc_bundle({0: first, 1: rng.standard_normal((32, 4))}, (RELU, IDENTITY))
        perm = random_permutation(32, 0)
        suspect = quantize(permute_layer(model, 0, perm), 0, 8)

        ranking = baseline_norm_ranking(model.layers[0], model.weight(0), suspect.weight(0))
        self.assertLess(psi(perm, ranking.permutation), 100.0)
        _, report = resync_model(model, suspect, true_perms={0: perm})
        self.assertEqual(report.overall_psi, 100.0)


class TestOutputAnalysis(unittest.TestCase):
    def test_self_and_scaled_copy(self):
        model = fc_bundle({0: [[1.0, 2.0], [3.0, 6.0]], 1: np.ones((2, 2))}, (RELU, IDENTITY))
        data = np.random.default_rng(0).standard_normal((40, 2))
        self.assertAlmostEqual(output_cosine(model, 0, 0, 0, data), 1.0)
        self.assertAlmostEqual(output_cosine(model, 0, 0, 1, data, Stage.PRE), 1.0)

    def test_relu_makes_different_neurons_identical(self):
        model = fc_bundle({0: [[1.0, 1.0], [0.0, 0.5]], 1: np.ones((2, 2))}, (RELU, IDENTITY))
        data = np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 1.0], [-2.0, 1.0]])
        self.assertAlmostEqual(output_cosine(model, 0, 0, 1, data, Stage.POST), 1.0, places=12)
        self.assertLess(output_cosine(model, 0, 0, 1, data, Stage.PRE), 0.999)
        vectors = model.weight(0).T
        self.assertLess(float(vectors[0] @ vectors[1]) / np.prod(np.linalg.norm(vectors, axis=1)), 0.999)

        matrix = pairwise_output_cosine(model, 0, data)
        np.testing.assert_allclose(matrix, matrix.T)
        self.assertEqual([pair[:2] for pair in redundant_pairs(matrix)], [(0, 1)])

    def test_conv_outputs_concatenate_positions(self):
        setup = conv_setup()
        matrix = pairwise_output_cosine(setup.model, 1, setup.dataset.inputs[:20], Stage.PRE)
        self.assertEqual(matrix.shape, (8, 8))
        np.testing.assert_allclose(np.diag(matrix), 1.0, atol=1e-9)

    def test_neuron_out_of_range(self):
        with self.assertRaises(ValidationError):
            output_cosine(mlp_setup().model, 0, 0, 32, np.zeros((2, 8)))


if __name__ == "__main__":
    unittest.main()
