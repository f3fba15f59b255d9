"""Dense operators on small truncated-mode Hilbert spaces.

Matrices are plain complex ``numpy`` arrays. Mode 0 is the most
significant tensor factor, so ``|0100>`` has mode 1 excited.
"""

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np


@dataclass(frozen=True)
class HilbertSpace:
    mode_dims: tuple = (2, 2, 2, 2)

    def __post_init__(self):
        if not self.mode_dims or any(int(d) != d or d < 2 for d in self.mode_dims):
            raise ValueError("every mode dimension must be an integer >= 2")

    @property
    def total_dim(self):
        return math.prod(self.mode_dims)

    @property
    def n_modes(self):
        return len(self.mode_dims)


def annihilation(d):
    """Truncated lowering operator: ``a[n-1, n] = sqrt(n)``."""
    if d < 2:
        raise ValueError("truncation dimension must be >= 2")
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def identity(d):
    return np.eye(d, dtype=complex)


def dag(A):
    return A.conj().T


def embed(op, mode_index, space):
    """``I x ... x op x ... x I`` with ``op`` acting on mode ``mode_index``."""
    op = np.asarray(op)
    if not 0 <= mode_index < space.n_modes:
        raise IndexError(f"mode index {mode_index} out of range for {space.n_modes} modes")
    d = space.mode_dims[mode_index]
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match mode dimension {d}")
    factors = [op if k == mode_index else identity(dk) for k, dk in enumerate(space.mode_dims)]
    return reduce(np.kron, factors)


def lowering_ops(space):
    """Embedded lowering operator for every mode."""
    return [embed(annihilation(d), k, space) for k, d in enumerate(space.mode_dims)]


# Pade [13/13] coefficients and the 1-norm bound for double precision (Higham 2005)
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def expm(A):
    """Matrix exponential by scaling and squaring around a [13/13] Pade approximant."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expm requires a square matrix")
    A = A.astype(complex if np.iscomplexobj(A) else float)
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    if norm == 0:
        return np.eye(n, dtype=A.dtype)
    s = 0
    if norm > _THETA13:
        s = int(math.ceil(math.log2(norm / _THETA13)))
        A = A / (2.0**s)
    b = _PADE13
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


def hs_inner(A, B):
    """Hilbert-Schmidt inner product ``Tr(A^dagger B)``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))
