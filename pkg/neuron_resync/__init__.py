"""
Neuron Resync - Permutation Attacks & Re-synchronization 🔁

Permutes, perturbs and re-synchronizes the neurons of small sequential
networks, and checks what re-synchronization cannot see.

Core capabilities:
- Function-preserving neuron permutation and five weight perturbations
- Cosine-similarity matching with greedy, exact and row-argmax solvers
- ℓ2-norm integrity gate with closed-form KL analysis of scaled neurons
- Projection watermark embedding and extraction
- Bit-exact single-file weight container and a CSV sweep harness
"""

# <!-- VERSION_START -->
try:
    from importlib.metadata import PackageNotFoundError
    from importlib.metadata import version as _version

    __version__ = _version("neuron-resync")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.1.0"
# <!-- VERSION_END -->
