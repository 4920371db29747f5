"""Gaussian sensing ensembles, intensity measurements, and the rank-2
quadratic forms they induce on the real embedding.

A sensing vector lives as its embedding a_plus in R^{2n}.  The matrix
A_i = a_plus a_plus^T + a_minus a_minus^T satisfies <A_i x, x> = |<a_i, z>|^2
for the unembedded complex pair and is never materialized in hot paths;
a dense helper exists for small-dimension oracle tests only.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from .embedding import (
    as_complex_vector,
    as_real_embedding,
    embed_plus,
    apply_M,
)
from .seeding import derive_seed

DENSE_MATRIX_CAP = 16  # max 2n for materializing A_i in oracle helpers
MEASUREMENT_RTOL = 1e-12


@dataclass
class SensingEnsemble:
    """m sensing vectors as rows of an (m, 2n) float array plus the sampling scale.

    sigma is the per-entry standard deviation the vectors were drawn with;
    the fourth-moment normalization constant is c = m * sigma^4.  Instances
    are immutable after construction (reads are concurrency-safe).
    """

    vectors: np.ndarray
    sigma: float = 1.0
    seed: int | None = None
    vectors_minus: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 2 or v.shape[1] % 2 != 0:
            raise ValueError("vectors must be an (m >= 1, 2n >= 2) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("sensing vectors have non-finite entries")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        self.vectors = v
        n = v.shape[1] // 2
        self.vectors_minus = np.concatenate([-v[:, n:], v[:, :n]], axis=1)

    @property
    def m(self):
        return self.vectors.shape[0]

    @property
    def dim(self):
        """Embedding dimension 2n."""
        return self.vectors.shape[1]

    @property
    def n(self):
        return self.vectors.shape[1] // 2

    @property
    def c(self):
        """Fourth-moment normalization m * sigma^4."""
        return self.m * self.sigma**4


def sample_ensemble(n, m, seed):
    """Draw m standard-normal sensing embeddings in R^{2n}, sigma = 1.

    The stream is numpy's PCG64 + ziggurat standard normal, fully determined
    by the integer seed; identical seeds give bit-identical ensembles.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must both be at least 1")
    rng = np.random.default_rng(int(seed))
    return SensingEnsemble(rng.standard_normal((m, 2 * n)), sigma=1.0, seed=int(seed))


def quadratic_form(a_plus, x_plus):
    """<A x, x> = <a_plus, x>^2 + <a_minus, x>^2, without forming A."""
    a = as_real_embedding(a_plus)
    x = as_real_embedding(x_plus)
    if a.size != x.size:
        raise ValueError(f"length mismatch: {a.size} vs {x.size}")
    return float(np.dot(a, x) ** 2 + np.dot(apply_M(a), x) ** 2)


def quadratic_forms(ensemble, x_plus):
    """All m quadratic forms <A_i x, x> as one array."""
    x = as_real_embedding(x_plus)
    if x.size != ensemble.dim:
        raise ValueError(f"dimension mismatch: {x.size} vs {ensemble.dim}")
    return (ensemble.vectors @ x) ** 2 + (ensemble.vectors_minus @ x) ** 2


def measure(ensemble, x_gt):
    """Intensity measurements y_i = |<a_i, x_gt>|^2 for a complex ground truth."""
    g = as_complex_vector(x_gt)
    if 2 * g.size != ensemble.dim:
        raise ValueError(f"dimension mismatch: 2*{g.size} vs {ensemble.dim}")
    return quadratic_forms(ensemble, embed_plus(g))


def eigen_structure(a_plus):
    """Spectral data of A = a a^T + (Ma)(Ma)^T: the double eigenvalue ||a||^2
    and its orthonormal eigenbasis (a/||a||, Ma/||Ma||)."""
    a = as_real_embedding(a_plus)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        raise ValueError("zero sensing vector has no eigenbasis")
    v1 = a / norm
    am = apply_M(a)
    v2 = am / np.linalg.norm(am)
    return norm**2, (v1, v2)


def dense_sensing_matrix(a_plus):
    """Materialize A = a a^T + (Ma)(Ma)^T.  Oracle helper, dim <= 16 only."""
    a = as_real_embedding(a_plus)
    if a.size > DENSE_MATRIX_CAP:
        raise ValueError(f"dense matrix helper capped at dim {DENSE_MATRIX_CAP}")
    am = apply_M(a)
    return np.outer(a, a) + np.outer(am, am)


@dataclass
class ProblemInstance:
    """A sensing ensemble, a complex ground truth, and its measurements."""

    ensemble: SensingEnsemble
    ground_truth: np.ndarray
    measurements: np.ndarray
    gt_plus: np.ndarray = field(init=False, repr=False)
    gt_minus: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = as_complex_vector(self.ground_truth)
        if 2 * g.size != self.ensemble.dim:
            raise ValueError("ground truth dimension does not match ensemble")
        y = np.asarray(self.measurements, dtype=np.float64)
        if y.shape != (self.ensemble.m,):
            raise ValueError("need one measurement per sensing vector")
        if np.any(y < 0):
            raise ValueError("intensity measurements must be nonnegative")
        self.ground_truth = g
        self.measurements = y
        self.gt_plus = embed_plus(g)
        self.gt_minus = apply_M(self.gt_plus)
        self.validate()

    def validate(self):
        """Recompute y from the ensemble/ground truth and check consistency."""
        expected = measure(self.ensemble, self.ground_truth)
        scale = np.maximum(1.0, np.abs(expected))
        if np.any(np.abs(self.measurements - expected) > MEASUREMENT_RTOL * scale):
            raise ValueError("measurements inconsistent with ensemble and ground truth")

    @property
    def n(self):
        return self.ensemble.n

    @property
    def m(self):
        return self.ensemble.m

    @classmethod
    def from_ground_truth(cls, ensemble, x_gt):
        return cls(ensemble, as_complex_vector(x_gt), measure(ensemble, x_gt))


def random_instance(n, m, seed):
    """Fresh instance with standard-normal sensing vectors and a ground truth
    whose embedding is standard normal in R^{2n}; children of one seed."""
    ensemble = sample_ensemble(n, m, derive_seed(seed, 0))
    rng = np.random.default_rng(derive_seed(seed, 1))
    gt_plus = rng.standard_normal(2 * n)
    x_gt = gt_plus[:n] + 1j * gt_plus[n:]
    return ProblemInstance.from_ground_truth(ensemble, x_gt)


def instance_to_json(instance, indent=2):
    """Serialize an instance to the interchange JSON document."""
    g = instance.ground_truth
    interleaved = np.empty(2 * g.size)
    interleaved[0::2] = g.real
    interleaved[1::2] = g.imag
    doc = {
        "n": instance.n,
        "m": instance.m,
        "seed": instance.ensemble.seed,
        "sigma": instance.ensemble.sigma,
        "ground_truth": interleaved.tolist(),
        "vectors": instance.ensemble.vectors.ravel().tolist(),
        "measurements": instance.measurements.tolist(),
    }
    return json.dumps(doc, sort_keys=True, indent=indent)


def instance_from_json(text):
    """Load an instance from its JSON document, re-validating measurements."""
    doc = json.loads(text)
    n, m = int(doc["n"]), int(doc["m"])
    vectors = np.asarray(doc["vectors"], dtype=np.float64).reshape(m, 2 * n)
    seed = doc.get("seed")
    ensemble = SensingEnsemble(vectors, sigma=float(doc["sigma"]),
                               seed=None if seed is None else int(seed))
    flat = np.asarray(doc["ground_truth"], dtype=np.float64)
    x_gt = flat[0::2] + 1j * flat[1::2]
    y = np.asarray(doc["measurements"], dtype=np.float64)
    return ProblemInstance(ensemble, x_gt, y)
