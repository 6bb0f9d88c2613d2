"""Pure-numpy message-passing kernels for affinity propagation.

Fallback backend used when the compiled extension is unavailable (or when
COMPSIM_PURE_PYTHON=1).  Must stay numerically equivalent to
``compsim._ap_kernel``; the backend-parity tests enforce this.
"""

from __future__ import annotations

import numpy as np


def responsibility_update(S, R_old, A, damping):
    """Damped responsibility messages.

    raw(m, n) = S(m, n) - max_{n' != n} (A(m, n') + S(m, n'))
    returns damping * R_old + (1 - damping) * raw.

    For a single node the competing-candidate set is empty and the raw
    update degenerates to S itself.
    """
    n = S.shape[0]
    if n == 1:
        raw = S.copy()
    else:
        AS = A + S
        rows = np.arange(n)
        best_idx = np.argmax(AS, axis=1)
        best = AS[rows, best_idx]
        AS[rows, best_idx] = -np.inf
        second = np.max(AS, axis=1)
        raw = S - best[:, None]
        raw[rows, best_idx] = S[rows, best_idx] - second
    return damping * R_old + (1.0 - damping) * raw


def availability_update(R, A_old, damping):
    """Damped availability messages.

    raw(m, n) = min(0, R(n, n) + sum_{m' not in {m, n}} max(0, R(m', n)))
    raw(n, n) = sum_{m' != n} max(0, R(m', n))
    returns damping * A_old + (1 - damping) * raw.
    """
    Rp = np.maximum(R, 0.0)
    np.fill_diagonal(Rp, np.diagonal(R))
    col_totals = Rp.sum(axis=0)
    raw = col_totals[None, :] - Rp
    diag = np.diagonal(raw).copy()  # sum_{m' != n} max(0, R(m', n))
    raw = np.minimum(raw, 0.0)
    np.fill_diagonal(raw, diag)
    return damping * A_old + (1.0 - damping) * raw
