"""Pure numpy implementations of the batched kernels.

Every function takes C-contiguous float64 arrays whose first axis is the
batch axis and returns freshly allocated arrays.  The compiled module
``s2xs2._kernels`` exposes the same functions with the same signatures.
"""

import numpy as np

# (j, i, k) <-> (i, j, k) coordinate permutation; it is its own inverse.
_PERM = np.array([1, 0, 2])


def qmul(p, q):
    a1, b1, c1, d1 = p[:, 0], p[:, 1], p[:, 2], p[:, 3]
    a2, b2, c2, d2 = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty_like(p)
    out[:, 0] = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2
    out[:, 1] = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2
    out[:, 2] = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2
    out[:, 3] = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2
    return out


def _std_matrix(w):
    """Matrix of x -> w x conj(w) on (i, j, k), one per row of ``w``."""
    a, b, c, d = w[:, 0], w[:, 1], w[:, 2], w[:, 3]
    R = np.empty((w.shape[0], 3, 3))
    R[:, 0, 0] = a * a + b * b - c * c - d * d
    R[:, 0, 1] = 2.0 * (b * c - a * d)
    R[:, 0, 2] = 2.0 * (b * d + a * c)
    R[:, 1, 0] = 2.0 * (b * c + a * d)
    R[:, 1, 1] = a * a - b * b + c * c - d * d
    R[:, 1, 2] = 2.0 * (c * d - a * b)
    R[:, 2, 0] = 2.0 * (b * d - a * c)
    R[:, 2, 1] = 2.0 * (c * d + a * b)
    R[:, 2, 2] = a * a - b * b - c * c + d * d
    return R


def qrotate(w, x):
    # conj(w) x w for unit w: transpose of the standard matrix.
    R = _std_matrix(w)
    return np.einsum("nsr,ns->nr", R, x)


def spin_cover(w):
    R = _std_matrix(w)
    # rho[r, s] = R[perm(s), perm(r)]
    return np.ascontiguousarray(R[:, _PERM][:, :, _PERM].transpose(0, 2, 1))


def lift(rho):
    R = np.ascontiguousarray(rho[:, _PERM][:, :, _PERM].transpose(0, 2, 1))
    n = R.shape[0]
    tr = R[:, 0, 0] + R[:, 1, 1] + R[:, 2, 2]
    choice = np.argmax(
        np.stack([tr, R[:, 0, 0], R[:, 1, 1], R[:, 2, 2]], axis=1), axis=1
    )
    q = np.empty((n, 4))
    for branch in range(4):
        m = choice == branch
        if not m.any():
            continue
        S = R[m]
        if branch == 0:
            s = np.sqrt(1.0 + tr[m]) * 2.0
            q[m] = np.stack([
                0.25 * s,
                (S[:, 2, 1] - S[:, 1, 2]) / s,
                (S[:, 0, 2] - S[:, 2, 0]) / s,
                (S[:, 1, 0] - S[:, 0, 1]) / s,
            ], axis=1)
        elif branch == 1:
            s = np.sqrt(1.0 + S[:, 0, 0] - S[:, 1, 1] - S[:, 2, 2]) * 2.0
            q[m] = np.stack([
                (S[:, 2, 1] - S[:, 1, 2]) / s,
                0.25 * s,
                (S[:, 0, 1] + S[:, 1, 0]) / s,
                (S[:, 0, 2] + S[:, 2, 0]) / s,
            ], axis=1)
        elif branch == 2:
            s = np.sqrt(1.0 - S[:, 0, 0] + S[:, 1, 1] - S[:, 2, 2]) * 2.0
            q[m] = np.stack([
                (S[:, 0, 2] - S[:, 2, 0]) / s,
                (S[:, 0, 1] + S[:, 1, 0]) / s,
                0.25 * s,
                (S[:, 1, 2] + S[:, 2, 1]) / s,
            ], axis=1)
        else:
            s = np.sqrt(1.0 - S[:, 0, 0] - S[:, 1, 1] + S[:, 2, 2]) * 2.0
            q[m] = np.stack([
                (S[:, 1, 0] - S[:, 0, 1]) / s,
                (S[:, 0, 2] + S[:, 2, 0]) / s,
                (S[:, 1, 2] + S[:, 2, 1]) / s,
                0.25 * s,
            ], axis=1)
    q /= np.linalg.norm(q, axis=1)[:, None]
    return q


def fa_apply(A, u, v):
    """(u, v) -> (-A v, A^T u) with one rotation per row."""
    nu = -np.einsum("nij,nj->ni", A, v)
    nv = np.einsum("nji,nj->ni", A, u)
    return nu, nv
