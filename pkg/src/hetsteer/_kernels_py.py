"""NumPy reference for the batched coherent-state quadratic forms.

Used when the compiled extension is unavailable, and as its test oracle.
"""
import math

import numpy as np

RESCALE = 1e150
LOG_RESCALE = math.log(RESCALE)


def coherent_rows(betas, k: int):
    """Unit-normalized truncations of ``|beta>`` onto ``|0>..|k-1>``.

    Returns ``(u, log_mass)`` where ``u`` has shape ``(M, k)`` and
    ``log_mass = log sum_{n<k} |<n|beta>|^2``. The amplitudes are built from 1
    by the ratio recurrence and rescaled when they grow past ``RESCALE``, so
    neither the Gaussian prefactor nor ``beta^n/sqrt(n!)`` can overflow.
    """
    betas = np.asarray(betas, dtype=complex).reshape(-1)
    m = betas.size
    u = np.empty((m, k), dtype=complex)
    u[:, 0] = 1.0
    log_scale = np.zeros(m)
    for n in range(k - 1):
        u[:, n + 1] = u[:, n] * betas / math.sqrt(n + 1)
        big = np.abs(u[:, n + 1]) > RESCALE
        if big.any():
            u[big, : n + 2] /= RESCALE
            log_scale[big] += LOG_RESCALE
    s = np.sum(u.real**2 + u.imag**2, axis=1)
    u /= np.sqrt(s)[:, None]
    log_mass = -np.abs(betas) ** 2 + 2.0 * log_scale + np.log(s)
    return u, log_mass


def quadratic_forms(f, betas):
    """``q[m, v] = <u_m| f[v] |u_m>`` for the normalized rows of :func:`coherent_rows`.

    ``f`` has shape ``(4, k, k)`` and every slice must be Hermitian.
    """
    f = np.asarray(f, dtype=complex)
    if f.ndim != 3 or f.shape[0] != 4 or f.shape[1] != f.shape[2]:
        raise ValueError(f"expected f of shape (4, k, k), got {f.shape}")
    u, log_mass = coherent_rows(betas, f.shape[-1])
    uc = u.conj()
    q = np.empty((u.shape[0], f.shape[0]))
    for v in range(f.shape[0]):
        q[:, v] = np.sum(uc @ f[v] * u, axis=1).real
    return q, log_mass
