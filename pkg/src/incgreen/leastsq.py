"""Dense least squares via Householder QR with column pivoting.

Pivoting makes rank deficiency show up as a tiny trailing diagonal of R at
a known column index, which lets callers report *which* basis column group
collapsed instead of silently returning a garbage fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class RankDeficiencyError(RuntimeError):
    def __init__(self, message, column: int):
        super().__init__(message)
        self.column = column  # original (unpivoted) index of the bad column


@dataclass
class LstsqResult:
    coefficients: np.ndarray
    rank: int
    r_diag: np.ndarray       # |diagonal of R| in pivot order
    pivots: np.ndarray       # r_diag[k] belongs to original column pivots[k]


def solve_lstsq(a: np.ndarray, b: np.ndarray,
                rcond: float = 1e-10) -> LstsqResult:
    """Minimize |a x - b|_2; raises RankDeficiencyError when a pivoted
    diagonal entry of R falls below rcond times the largest column norm."""
    r = np.array(a, dtype=float, order="F", copy=True)
    y = np.array(b, dtype=float, copy=True)
    m, n = r.shape
    if m < n:
        raise ValueError(f"system is underdetermined: {m} rows, {n} columns")
    piv = np.arange(n)
    threshold = rcond * float(np.max(np.linalg.norm(r, axis=0)))
    r_diag = np.empty(n)

    for k in range(n):
        # pick the remaining column with the largest active norm
        norms = np.linalg.norm(r[k:, k:], axis=0)
        j = k + int(np.argmax(norms))
        if j != k:
            r[:, [k, j]] = r[:, [j, k]]
            piv[[k, j]] = piv[[j, k]]
        x = r[k:, k]
        alpha = np.linalg.norm(x)
        r_diag[k] = alpha
        if alpha <= threshold:
            raise RankDeficiencyError(
                f"rank deficient at pivot {k}: column {piv[k]} has residual "
                f"norm {alpha:.3e} against threshold {threshold:.3e}",
                column=int(piv[k]))
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        # apply the reflector I - 2 v v^T to the trailing block and rhs
        r[k:, k + 1:] -= 2.0 * np.outer(v, v @ r[k:, k + 1:])
        y[k:] -= 2.0 * v * (v @ y[k:])
        r[k, k] = alpha
        r[k + 1:, k] = 0.0

    # back substitution on the upper-triangular n x n block
    z = np.empty(n)
    for k in range(n - 1, -1, -1):
        z[k] = (y[k] - r[k, k + 1:n] @ z[k + 1:]) / r[k, k]
    coeff = np.empty(n)
    coeff[piv] = z
    return LstsqResult(coeff, n, r_diag, piv)
