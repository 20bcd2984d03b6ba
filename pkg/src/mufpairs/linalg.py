"""Dense complex linear algebra on C^d and C^d (x) C^d.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Bipartite
operators act on C^d (x) C^d with the row-major composite index
``(i, j) -> i * d + j``, which is exactly the convention of ``np.kron``.
"""

import math

import numpy as np

ATOL = 1e-10


class DimensionError(ValueError):
    """Raised when an operand does not have the required shape."""


def as_matrix(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    return A


def local_dim(M):
    """Local dimension d of a d**2 x d**2 bipartite operator."""
    M = as_matrix(M)
    d = math.isqrt(M.shape[0])
    if d * d != M.shape[0]:
        raise DimensionError(f"dimension {M.shape[0]} is not a perfect square")
    return d


def kron(A, B):
    """Tensor product A (x) B in the row-major composite convention."""
    return np.kron(as_matrix(A), as_matrix(B))


def partial_trace(M, side="second"):
    """Trace out one tensor factor of a bipartite operator.

    Parameters
    ----------
    M : (d**2, d**2) array
    side : {"first", "second"}
        The factor that is traced out.
    """
    d = local_dim(M)
    T = np.asarray(M, dtype=complex).reshape(d, d, d, d)
    if side == "first":
        return np.einsum("ijik->jk", T)
    if side == "second":
        return np.einsum("ijkj->ik", T)
    raise ValueError(f"side must be 'first' or 'second', not {side!r}")


def partial_transpose(M):
    """Transpose the second tensor factor, (I (x) T)(M)."""
    d = local_dim(M)
    T = np.asarray(M, dtype=complex).reshape(d, d, d, d)
    return T.transpose(0, 3, 2, 1).reshape(d * d, d * d)


def swap_operator(d):
    """U_SW with U_SW (u (x) v) = v (x) u."""
    if d < 1:
        raise ValueError("d must be positive")
    U = np.zeros((d * d, d * d), dtype=complex)
    i, j = np.divmod(np.arange(d * d), d)
    U[j * d + i, i * d + j] = 1.0
    return U


def sym_asym_projectors(d):
    """Projectors onto the symmetric and antisymmetric subspaces."""
    I = np.eye(d * d, dtype=complex)
    U = swap_operator(d)
    return (I + U) / 2, (I - U) / 2


def max_entangled_projector(d):
    """|beta><beta| with |beta> = d**-1/2 sum_i |i>|i>."""
    beta = np.eye(d, dtype=complex).reshape(d * d) / math.sqrt(d)
    return np.outer(beta, beta.conj())


def frobenius_inner(A, B):
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def frobenius_norm(A):
    return float(np.linalg.norm(A))


def projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def is_hermitian(A, atol=ATOL):
    A = as_matrix(A)
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= atol)


def is_unitary(A, atol=ATOL):
    A = as_matrix(A)
    I = np.eye(A.shape[0])
    return bool(np.max(np.abs(A.conj().T @ A - I), initial=0.0) <= atol)


def is_psd(A, atol=ATOL):
    A = as_matrix(A)
    if not is_hermitian(A, atol):
        return False
    return bool(np.linalg.eigvalsh((A + A.conj().T) / 2)[0] >= -atol)


def numerical_rank(A, rtol=1e-9):
    """Number of singular values above ``rtol * sigma_max``."""
    s = np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))
