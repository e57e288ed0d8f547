"""
Zero-Forcing Core
-----------------
Gram matrix, Cholesky-based inverse-Gram diagonal, effective ZF gains and
unit-norm ZF precoders under perfect CSI.
Project: LoS Massive MIMO Antenna Count
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, lapack, solve_triangular

from .channel import ChannelMatrix
from .errors import ConfigurationError, DomainError, SingularChannelError

PIVOT_TOLERANCE = 1e-12
GRAM_BLOCK_ROWS = 4096


@dataclass(frozen=True)
class ZfDiagnostics:
    """
    Attributes
    ----------
    gram : numpy.ndarray
        (K, K) Hermitian G^H G.
    inv_gram_diag : numpy.ndarray
        (K,) diagonal of (G^H G)^-1.
    condition_estimate : float
        Ratio of the largest to the smallest Gram eigenvalue.
    factor : numpy.ndarray
        Lower Cholesky factor L with G^H G = L L^H.
    """

    gram: np.ndarray
    inv_gram_diag: np.ndarray
    condition_estimate: float
    factor: np.ndarray

    @property
    def K(self):
        return self.gram.shape[0]

    @property
    def gains(self):
        """Post-ZF effective power gains 1 / [(G^H G)^-1]_kk."""
        return 1.0 / self.inv_gram_diag


@dataclass(frozen=True)
class NaiveZf:
    gram: np.ndarray
    inv_gram_diag: np.ndarray
    precoders: np.ndarray
    w_norms: np.ndarray


def _entries(G):
    entries = G.entries if isinstance(G, ChannelMatrix) else G
    return np.asarray(entries, dtype=complex)


def gram_matrix(G, block_rows=GRAM_BLOCK_ROWS):
    """
    G^H G accumulated over row blocks.

    Each block product stays short enough that rounding does not grow with M;
    the partial Grams are then summed. The result is made exactly Hermitian.
    """
    entries = _entries(G)
    M = entries.shape[0]
    partial = [
        entries[start:start + block_rows].conj().T @ entries[start:start + block_rows]
        for start in range(0, M, block_rows)
    ]
    gram = np.sum(partial, axis=0) if len(partial) > 1 else partial[0]
    return 0.5 * (gram + gram.conj().T)


def zf_diagnostics(G):
    """
    Zero-forcing quantities for one channel realization.

    Raises
    ------
    SingularChannelError
        If a Cholesky pivot falls below 1e-12 times the largest Gram diagonal.
    """
    entries = _entries(G)
    M, K = entries.shape
    if M < K:
        raise ConfigurationError(f"zero-forcing needs M >= K (M={M}, K={K})", key="M")

    gram = gram_matrix(entries)
    scale = float(np.max(gram.diagonal().real))
    if not scale > 0:
        raise SingularChannelError(0, 0.0)

    factor, info = lapack.zpotrf(gram, lower=1, clean=1)
    if info > 0:
        raise SingularChannelError(info - 1)
    if info < 0:
        raise DomainError(f"Cholesky factorization rejected argument {-info}")

    pivots = np.abs(factor.diagonal()) ** 2
    small = np.flatnonzero(pivots < PIVOT_TOLERANCE * scale)
    if small.size:
        index = int(small[0])
        raise SingularChannelError(index, float(pivots[index]))

    # diag((L L^H)^-1) = column sums of |L^-1|^2
    factor_inv = solve_triangular(factor, np.eye(K, dtype=complex), lower=True)
    inv_gram_diag = np.sum(np.abs(factor_inv) ** 2, axis=0)

    eigenvalues = np.linalg.eigvalsh(gram)
    condition = float(eigenvalues[-1] / eigenvalues[0]) if eigenvalues[0] > 0 else np.inf

    return ZfDiagnostics(
        gram=gram,
        inv_gram_diag=inv_gram_diag,
        condition_estimate=condition,
        factor=factor,
    )


def zf_uplink_gain(diag, k):
    """Effective post-ZF power gain of terminal k: uplink SINR_k = p_k * gain_k / sigma^2."""
    return float(1.0 / diag.inv_gram_diag[k])


def zf_precoders(G, diag=None):
    """
    Unit-norm ZF precoders a_k = w_k / ||w_k|| with W = G (G^H G)^-1.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        (M, K) precoders and the (K,) norms ||w_k||.
    """
    entries = _entries(G)
    if diag is None:
        diag = zf_diagnostics(entries)
    K = diag.K
    W = entries @ cho_solve((diag.factor, True), np.eye(K, dtype=complex))
    w_norms = np.linalg.norm(W, axis=0)
    return W / w_norms[np.newaxis, :], w_norms


def naive_zf(G):
    """Brute-force ZF quantities from an explicit pseudoinverse (reference values)."""
    entries = _entries(G)
    gram = entries.conj().T @ entries
    W = np.linalg.pinv(entries).conj().T
    w_norms = np.linalg.norm(W, axis=0)
    return NaiveZf(
        gram=gram,
        inv_gram_diag=np.linalg.inv(gram).diagonal().real,
        precoders=W / w_norms[np.newaxis, :],
        w_norms=w_norms,
    )
