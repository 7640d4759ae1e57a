"""
Verification - ℓ2-Norm Integrity Gate 🛡️

Cosine matching is blind to a neuron multiplied by a positive scalar. This
module compares every neuron of a re-synchronized suspect with its reference
counterpart by direction and by norm, flags scaled neurons, and undoes the
scaling on request.
"""

import logging
from typing import Dict

import numpy as np

from ..attack.permutation import check_layer
from ..core.config import COLLINEAR_EPS, COSINE_EPS, NORM_EPS
from ..core.errors import ArchitectureMismatchError, ShapeError, ValidationError
from ..core.tensor import cosine
from ..core.types import (
    CollinearityCheck,
    IntegrityVerdict,
    ModelBundle,
    NeuronFlag,
    NeuronVerdict,
    tensor_name,
)
from ..model.views import from_neuron_vectors, neuron_vectors

logger = logging.getLogger(__name__)


def classify_neuron(similarity: float, norm_ratio: float, cosine_eps: float, norm_eps: float) -> NeuronFlag:
    """Flag one neuron from its cosine to the reference and its norm ratio."""
    if similarity < 1.0 - cosine_eps or not np.isfinite(norm_ratio):
        return NeuronFlag.MODIFIED
    if abs(norm_ratio - 1.0) > norm_eps:
        return NeuronFlag.SCALED_NEURON
    return NeuronFlag.CLEAN


def verify_integrity(
    reference: ModelBundle,
    suspect: ModelBundle,
    layer: int,
    cosine_eps: float = COSINE_EPS,
    norm_eps: float = NORM_EPS,
) -> IntegrityVerdict:
    """Compare every neuron of ``layer`` with the reference.

    The suspect is expected to be re-synchronized already. A neuron is
    ``scaled`` when its direction is unchanged (cosine ``>= 1 − εc``) but its
    norm ratio differs from 1 by more than ``εn``, and ``modified`` when its
    direction changed.

    Raises:
        ArchitectureMismatchError: If the architectures differ
        ValidationError: If ``layer`` is out of range
    """
    if not reference.same_architecture(suspect):
        raise ArchitectureMismatchError("reference and suspect architectures differ")
    check_layer(reference, layer)
    spec = reference.layers[layer]
    ref_vectors = neuron_vectors(spec, reference.weight(layer))
    sus_vectors = neuron_vectors(spec, suspect.weight(layer))
    ref_norms = np.linalg.norm(ref_vectors, axis=1)
    sus_norms = np.linalg.norm(sus_vectors, axis=1)

    neurons = []
    for index in range(spec.neurons):
        if ref_norms[index] == 0.0:
            ratio = 1.0 if sus_norms[index] == 0.0 else float("inf")
        else:
            ratio = float(sus_norms[index] / ref_norms[index])
        similarity = cosine(ref_vectors[index], sus_vectors[index])
        if ref_norms[index] == 0.0 and sus_norms[index] == 0.0:
            similarity = 1.0
        flag = classify_neuron(similarity, ratio, cosine_eps, norm_eps)
        neurons.append(NeuronVerdict(index, similarity, ratio, flag))

    verdict = IntegrityVerdict(layer, neurons)
    scaled = verdict.flagged(NeuronFlag.SCALED_NEURON)
    if scaled:
        logger.info("layer %d: scaled neurons %s", layer, scaled)
    return verdict


def correct_scaling(suspect: ModelBundle, verdict: IntegrityVerdict) -> ModelBundle:
    """Divide every ``scaled`` neuron's weights and bias by its norm ratio."""
    layer = verdict.layer
    spec = suspect.layers[layer]
    flagged = [n for n in verdict.neurons if n.flag is NeuronFlag.SCALED_NEURON]
    if not flagged:
        return suspect.copy()
    vectors = neuron_vectors(spec, suspect.weight(layer))
    bias = suspect.part(layer, "bias")
    bias = None if bias is None else bias.astype(np.float64)
    for neuron in flagged:
        vectors[neuron.index] /= neuron.norm_ratio
        if bias is not None:
            bias[neuron.index] /= neuron.norm_ratio
    updates: Dict[str, np.ndarray] = {tensor_name(layer, "weight"): from_neuron_vectors(spec, vectors)}
    if bias is not None:
        updates[tensor_name(layer, "bias")] = bias
    logger.info("rescaled %d neurons of layer %d", len(flagged), layer)
    return suspect.with_tensors(updates)


def check_cauchy_schwarz_condition(weights: np.ndarray, modified: np.ndarray) -> CollinearityCheck:
    """Test whether ``modified`` is a positive multiple of ``weights``.

    Equality in Cauchy–Schwarz holds only for collinear vectors, so a cosine
    of 1 (within ``1e-9``) means the modification is a pure positive scaling.
    A sign flip gives similarity −1 and is reported as not collinear.

    Raises:
        ShapeError: If the vectors differ in length
        ValidationError: If ``weights`` is the zero vector
    """
    w = np.asarray(weights, dtype=np.float64).ravel()
    w_tilde = np.asarray(modified, dtype=np.float64).ravel()
    if w.shape != w_tilde.shape:
        raise ShapeError(f"vectors differ in length: {w.size} and {w_tilde.size}")
    if not np.any(w):
        raise ValidationError("reference vector is zero")
    similarity = cosine(w, w_tilde)
    return CollinearityCheck(similarity >= 1.0 - COLLINEAR_EPS, similarity)
