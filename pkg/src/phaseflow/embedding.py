"""Dictionary between complex signals and their real embeddings.

A vector z in C^n is stored as x_plus = (Re z, Im z) in R^{2n}; the
companion x_minus = M x_plus embeds i*z, where M is the block rotation
[[0, -I], [I, 0]].  All calculus downstream happens on these real vectors.
This module owns the conversions, Hermitian inner products, and the
distance/phase alignment against the circle {x_gt * e^{i theta}} of
signals indistinguishable from intensity data.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def as_complex_vector(z):
    """Validate and return z as a 1-d complex128 array."""
    z = np.asarray(z, dtype=np.complex128)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("expected a nonempty 1-d complex vector")
    if not np.all(np.isfinite(z)):
        raise ValueError("complex vector has non-finite entries")
    return z


def as_real_embedding(x):
    """Validate and return x as a 1-d float64 array of even length."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0 or x.size % 2 != 0:
        raise ValueError("expected a nonempty 1-d real vector of even length")
    if not np.all(np.isfinite(x)):
        raise ValueError("real embedding has non-finite entries")
    return x


def embed_plus(z):
    """Map z in C^n to (Re z, Im z) in R^{2n}."""
    z = as_complex_vector(z)
    return np.concatenate([z.real, z.imag])


def apply_M(x_plus):
    """Apply the rotation M: (a, b) -> (-b, a).

    M is orthogonal and skew-symmetric with M^2 = -I; on embeddings it
    implements multiplication by i.
    """
    x = as_real_embedding(x_plus)
    n = x.size // 2
    return np.concatenate([-x[n:], x[:n]])


def embed_minus(z):
    """Map z to the embedding of i*z, i.e. M applied to embed_plus(z)."""
    return apply_M(embed_plus(z))


def unembed(x_plus):
    """Inverse of embed_plus: (a, b) -> a + i*b.  Rejects odd lengths."""
    x = as_real_embedding(x_plus)
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def rotate_phase(x_plus, theta):
    """Embedding of e^{i theta} z for the embedding of z:
    cos(theta) x_plus + sin(theta) M x_plus."""
    x = as_real_embedding(x_plus)
    return np.cos(theta) * x + np.sin(theta) * apply_M(x)


def hermitian_inner(a, b):
    """Complex inner product sum_i a_i * conj(b_i)."""
    a = as_complex_vector(a)
    b = as_complex_vector(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    # vdot conjugates its first argument
    return complex(np.vdot(b, a))


def phase_align(x, x_gt):
    """Angle theta in [0, 2pi) minimizing ||x - x_gt * e^{i theta}||.

    Closed form theta = arg <x, x_gt>; when the inner product vanishes
    (x orthogonal to x_gt) every angle ties and 0 is returned.
    """
    x = as_complex_vector(x)
    g = as_complex_vector(x_gt)
    if not np.any(g):
        raise ValueError("cannot align against a zero vector")
    ip = hermitian_inner(x, g)
    if ip == 0:
        return 0.0
    theta = float(np.angle(ip)) % TWO_PI
    if theta >= TWO_PI:  # guard against -eps wrapping to exactly 2*pi
        theta = 0.0
    return theta


def dist_to_orbit(x, x_gt):
    """Distance from x to the circle {x_gt * e^{i theta}}.

    Equals sqrt(||x||^2 + ||x_gt||^2 - 2 |<x, x_gt>|), the minimum of
    ||x - x_gt e^{i theta}|| over theta.
    """
    x = as_complex_vector(x)
    g = as_complex_vector(x_gt)
    if x.size != g.size:
        raise ValueError(f"length mismatch: {x.size} vs {g.size}")
    d2 = np.vdot(x, x).real + np.vdot(g, g).real - 2.0 * abs(hermitian_inner(x, g))
    return float(np.sqrt(max(d2, 0.0)))
