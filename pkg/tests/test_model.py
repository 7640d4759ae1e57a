import unittest

import numpy as np

from neuron_resync.core.errors import ShapeError, ValidationError
from neuron_resync.core.types import Activation, Dataset, LayerKind, LayerSpec, ModelBundle
from neuron_resync.model import (
    build_conv,
    build_mlp,
    dataset_from_config,
    error_rate,
    forward,
    forward_params,
    make_blobs,
    make_image_blobs,
    neuron_vectors,
)
from neuron_resync.model.data import blob_centers
from neuron_resync.model.views import from_neuron_vectors
from tests.support import conv_setup, fc_bundle, mlp_setup, random_inputs

RELU, IDENTITY = Activation.RELU, Activation.IDENTITY


class TestForward(unittest.TestCase):
    def test_identity_relu_layer(self):
        bundle = fc_bundle({0: np.eye(2)}, (RELU,))
        np.testing.assert_array_equal(forward(bundle, np.array([2.0, -3.0])).output, [2.0, 0.0])

    def test_hand_evaluated_chain(self):
        bundle = fc_bundle(
            {0: [[1.0, -1.0], [2.0, 0.0]], 1: [[2.0], [3.0]]},
            (RELU, IDENTITY),
            biases={0: [0.0, 0.0], 1: [1.0]},
        )
        trace = forward(bundle, np.array([1.0, 2.0]))
        np.testing.assert_array_equal(trace.pre_activations[0], [5.0, -1.0])
        np.testing.assert_array_equal(trace.activations[0], [5.0, 0.0])
        np.testing.assert_array_equal(trace.output, [11.0])

    def test_zero_input_zero_bias_gives_zero_output(self):
        bundle = build_mlp(4)
        self.assertTrue(np.all(forward(bundle, np.zeros((3, 8))).output == 0.0))

    def test_relu_outputs_are_non_negative(self):
        setup = mlp_setup()
        trace = forward(setup.model, random_inputs(setup.model, 50))
        for layer in range(setup.model.depth - 1):
            self.assertTrue(np.all(trace.activations[layer] >= 0.0))

    def test_input_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            forward(build_mlp(0), np.zeros((2, 7)))

    def test_one_by_one_conv_matches_fc_per_position(self):
        rng = np.random.default_rng(2)
        conv = LayerSpec(LayerKind.CONV2D, 3, 2, IDENTITY, has_bias=False)
        fc = LayerSpec(LayerKind.FULLY_CONNECTED, 3, 2, IDENTITY, has_bias=False)
        kernel = rng.standard_normal((2, 3, 1, 1))
        x = rng.standard_normal((5, 3, 4, 4))
        conv_out = forward_params([conv], {"layer0.weight": kernel}, x).output
        for h in range(4):
            for w in range(4):
                fc_out = forward_params([fc], {"layer0.weight": kernel[:, :, 0, 0].T}, x[:, :, h, w]).output
                np.testing.assert_allclose(conv_out[:, :, h, w], fc_out, atol=1e-6)

    def test_strided_conv_output_shape(self):
        spec = LayerSpec(LayerKind.CONV2D, 1, 2, RELU, kernel_h=2, kernel_w=2, stride=2)
        self.assertEqual(spec.output_shape((1, 6, 6)), (2, 3, 3))
        out = forward_params([spec], {"layer0.weight": np.ones((2, 1, 2, 2)), "layer0.bias": np.zeros(2)},
                             np.ones((1, 1, 6, 6))).output
        self.assertEqual(out.shape, (1, 2, 3, 3))
        np.testing.assert_array_equal(out, 4.0)

    def test_channel_scale_is_applied(self):
        bundle = build_mlp(0, widths=(2, 2, 2), channel_scale=True)
        scaled = bundle.with_tensors({"layer0.scale": np.array([2.0, 0.5]), "layer0.shift": np.array([1.0, -1.0])})
        x = np.array([[1.0, -1.0]])
        base = forward(bundle, x).responses[0]
        np.testing.assert_allclose(forward(scaled, x).pre_activations[0], base * [2.0, 0.5] + [1.0, -1.0])


class TestBundle(unittest.TestCase):
    def test_builders_validate(self):
        mlp = build_mlp(0)
        self.assertEqual([spec.neurons for spec in mlp.layers], [32, 32, 4])
        conv = build_conv(0)
        self.assertEqual(conv.layer_shapes()[1][1], (8, 4, 4))
        self.assertEqual(conv.layers[2].in_dim, 128)

    def test_validate_catches_missing_and_extra_tensors(self):
        bundle = build_mlp(0)
        missing = dict(bundle.weights)
        del missing["layer1.bias"]
        with self.assertRaises(ShapeError):
            ModelBundle(bundle.layers, missing, bundle.input_shape).validate()
        extra = dict(bundle.weights, stray=np.zeros(1, dtype=np.float32))
        with self.assertRaises(ShapeError):
            ModelBundle(bundle.layers, extra, bundle.input_shape).validate()

    def test_last_layer_must_be_identity(self):
        with self.assertRaises(ShapeError):
            fc_bundle({0: np.eye(2)}, (RELU,)).validate()

    def test_layer_spec_rejects_bad_sizes(self):
        with self.assertRaises(ValidationError):
            LayerSpec(LayerKind.FULLY_CONNECTED, 0, 3)
        with self.assertRaises(ValidationError):
            LayerSpec(LayerKind.FULLY_CONNECTED, 2, 3, kernel_h=3)

    def test_neuron_vectors_layout(self):
        conv = build_conv(0)
        vectors = neuron_vectors(conv.layers[1], conv.weight(1))
        self.assertEqual(vectors.shape, (8, 72))
        np.testing.assert_array_equal(vectors[3], conv.weight(1)[3].ravel())
        mlp = build_mlp(0)
        vectors = neuron_vectors(mlp.layers[0], mlp.weight(0))
        np.testing.assert_array_equal(vectors[5], mlp.weight(0)[:, 5])
        np.testing.assert_array_equal(from_neuron_vectors(mlp.layers[0], vectors), mlp.weight(0))

    def test_copy_is_deep(self):
        bundle = build_mlp(0)
        clone = bundle.copy()
        clone.weights["layer0.weight"][0, 0] += 1.0
        self.assertFalse(bundle.bit_equal(clone))


class TestData(unittest.TestCase):
    def test_blobs_are_deterministic(self):
        a = make_blobs(3, 4, 10, 8)
        b = make_blobs(3, 4, 10, 8)
        np.testing.assert_array_equal(a.inputs, b.inputs)
        np.testing.assert_array_equal(a.labels, b.labels)
        self.assertFalse(np.array_equal(a.inputs, make_blobs(4, 4, 10, 8).inputs))
        self.assertEqual(len(a), 40)
        self.assertEqual(sorted(set(a.labels.tolist())), [0, 1, 2, 3])

    def test_image_blobs_shape(self):
        data = make_image_blobs(0, 4, 5, (1, 8, 8))
        self.assertEqual(data.inputs.shape, (20, 1, 8, 8))

    def test_dataset_recipe_round_trip(self):
        setup = mlp_setup()
        rebuilt = dataset_from_config(setup.model.metadata["dataset"])
        np.testing.assert_array_equal(rebuilt.inputs, setup.dataset.inputs)
        with self.assertRaises(ValidationError):
            dataset_from_config({"seed": 0})

    def test_centers_keep_simplex_spacing(self):
        for num_classes, dim in ((4, 8), (4, 64), (3, 2), (8, 2), (16, 2), (5, 1)):
            centers = blob_centers(num_classes, dim)
            gaps = [np.linalg.norm(a - b) for i, a in enumerate(centers) for b in centers[i + 1 :]]
            self.assertGreater(min(gaps), 4.0, (num_classes, dim))

    def test_class_means_are_well_separated(self):
        for setup in (mlp_setup(), conv_setup()):
            data = setup.dataset
            inputs = data.inputs.reshape(len(data), -1).astype(np.float64)
            groups = [inputs[data.labels == c] for c in range(data.num_classes)]
            means = np.stack([g.mean(axis=0) for g in groups])
            within = float(np.sqrt(np.mean([g.var(axis=0).mean() for g in groups])))
            gaps = [np.linalg.norm(a - b) for i, a in enumerate(means) for b in means[i + 1 :]]
            self.assertGreater(min(gaps), 4.0 * within)

    def test_dataset_rejects_bad_labels(self):
        with self.assertRaises(ValidationError):
            Dataset(np.zeros((2, 3)), np.array([0, 5]), num_classes=4)
        with self.assertRaises(ShapeError):
            Dataset(np.zeros((2, 3)), np.array([0]), num_classes=4)


class TestErrorRate(unittest.TestCase):
    def test_constant_classifier(self):
        bundle = build_mlp(0)
        zeroed = bundle.with_tensors({name: np.zeros_like(value) for name, value in bundle.weights.items()})
        self.assertAlmostEqual(error_rate(zeroed, make_blobs(0, 4, 25, 8)), 75.0)

    def test_trained_references_learn_the_task(self):
        mlp = mlp_setup()
        self.assertLessEqual(error_rate(mlp.model, mlp.dataset), 5.0)
        conv = conv_setup()
        self.assertLessEqual(error_rate(conv.model, conv.dataset), 10.0)

    def test_class_count_mismatch(self):
        with self.assertRaises(ShapeError):
            error_rate(build_mlp(0, widths=(8, 3)), make_blobs(0, 4, 5, 8))


if __name__ == "__main__":
    unittest.main()
