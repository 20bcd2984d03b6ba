"""Reference numpy implementation of the search objectives.

Both objectives take the flat real parameter vector used by the optimizer:
complex vectors stored row by row with interleaved real and imaginary parts.
Vectors are normalized before evaluation, and the returned gradient is taken
with respect to the raw (unnormalized) coordinates.
"""

import numpy as np

from .weyl import context


def _normalize(params, count, d):
    V = np.ascontiguousarray(params, dtype=float).view(complex).reshape(count, d)
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms == 0):
        k = int(np.flatnonzero(norms == 0)[0])
        raise ZeroDivisionError(f"parameter vector {k} has zero norm")
    return V / norms[:, None], norms


def _pull_back(U, norms, gu):
    # chain rule through v -> v/|v|
    radial = np.real(np.sum(U.conj() * gu, axis=1))
    gv = (gu - U * radial[:, None]) / norms[:, None]
    return np.ascontiguousarray(gv).view(float).ravel()


def general_loss_grad(params, d, t):
    """Squared Frobenius residual of (1/n) sum_i pi_i (x) rho_i against the isotropic target."""
    n = d * d
    U, norms = _normalize(params, 2 * n, d)
    X, Y = U[:n], U[n:]
    Z = (X[:, :, None] * Y[:, None, :]).reshape(n, n)
    R = Z.T @ Z.conj() / n
    R[np.diag_indices(n)] -= (1 - t) / n
    i, j = np.divmod(np.arange(n), d)
    R[i * d + j, j * d + i] -= t / d
    loss = float(np.sum(R.real**2 + R.imag**2))
    G = ((2.0 / n) * (Z @ R.T)).reshape(n, d, d)
    gx = np.einsum("iab,ib->ia", G, Y.conj())
    gy = np.einsum("iab,ia->ib", G, X.conj())
    return loss, _pull_back(U, norms, 2 * np.concatenate([gx, gy]))


def covariant_loss_grad(params, d, t):
    """Residual of the full WH orbit pair generated by two fiducials.

    Equals (1/d**2) sum_{a != 0} |<x|W_a^dag|x><y|W_a|y> - t|**2.
    """
    U, norms = _normalize(params, 2, d)
    x, y = U
    ops = context(d).ops[1:]
    opsH = ops.conj().transpose(0, 2, 1)
    Wx, Wdx, Wy, Wdy = ops @ x, opsH @ x, ops @ y, opsH @ y
    p = Wdx @ x.conj()
    q = Wy @ y.conj()
    e = p * q - t
    scale = 1.0 / d**2
    loss = float(scale * np.sum(e.real**2 + e.imag**2))
    gx = (e.conj() * q) @ Wdx + (e * q.conj()) @ Wx
    gy = (e.conj() * p) @ Wy + (e * p.conj()) @ Wdy
    return loss, _pull_back(U, norms, 2 * scale * np.stack([gx, gy]))
