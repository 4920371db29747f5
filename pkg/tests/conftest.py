import numpy as np

import phaseflow as pf


def rel_close(a, b, rtol):
    """|a - b| <= rtol * max(1, |a|, |b|) for scalars or arrays (norm-wise)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    diff = np.linalg.norm((a - b).ravel())
    scale = max(1.0, np.linalg.norm(a.ravel()), np.linalg.norm(b.ravel()))
    return diff <= rtol * scale


def random_complex(rng, n, scale=1.0):
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def small_instance(n=3, m=14, seed=11):
    return pf.random_instance(n, m, seed)


def random_embedding(rng, dim, scale=1.0):
    return scale * rng.standard_normal(dim)
