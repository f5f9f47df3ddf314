"""Dense linear algebra over F_p on numpy integer arrays."""

from __future__ import annotations

import numpy as np


def rref_mod_p(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of A over F_p and its pivot columns."""
    M = np.array(A, dtype=np.int64) % p
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = M[r] * pow(int(M[r, c]), p - 2, p) % p
        col = M[:, c].copy()
        col[r] = 0
        mask = np.nonzero(col)[0]
        if mask.size:
            M[mask] = (M[mask] - np.outer(col[mask], M[r])) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace_mod_p(A: np.ndarray, p: int, ncols: int | None = None) -> list[np.ndarray]:
    """Basis of {x : A x = 0} over F_p."""
    if ncols is None:
        ncols = A.shape[1]
    if A.size == 0:
        return [np.eye(ncols, dtype=np.int64)[i] for i in range(ncols)]
    R, pivots = rref_mod_p(A, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = np.zeros(ncols, dtype=np.int64)
        x[f] = 1
        for row, pc in enumerate(pivots):
            x[pc] = (-R[row, f]) % p
        basis.append(x)
    return basis
