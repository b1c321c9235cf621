"""Direct sums of Hermitian matrices with real vector-space operations.

A moment matrix is stored as a tuple of complex blocks, each an ndarray
whose last two axes are square; leading axes batch blocks of equal size
(used for the Fourier sectors of translation-invariant problems).  The
inner product is the real Frobenius form Re tr[A^dag B] summed over all
blocks, which matches the geometry of the projections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BlockMatrix:
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "blocks", tuple(np.asarray(b, dtype=complex) for b in self.blocks)
        )

    @property
    def shapes(self) -> tuple[tuple[int, ...], ...]:
        return tuple(b.shape for b in self.blocks)

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        return BlockMatrix(tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "BlockMatrix") -> "BlockMatrix":
        return BlockMatrix(tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, scalar: float) -> "BlockMatrix":
        return BlockMatrix(tuple(scalar * a for a in self.blocks))

    __rmul__ = __mul__

    def __neg__(self) -> "BlockMatrix":
        return self * -1.0

    def copy(self) -> "BlockMatrix":
        return BlockMatrix(tuple(a.copy() for a in self.blocks))

    def zeros_like(self) -> "BlockMatrix":
        return BlockMatrix(tuple(np.zeros_like(a) for a in self.blocks))

    def inner(self, other: "BlockMatrix") -> float:
        """Real Frobenius inner product Re sum tr[A_b^dag B_b]."""
        return float(
            sum(np.vdot(a, b).real for a, b in zip(self.blocks, other.blocks))
        )

    def norm(self) -> float:
        return float(np.sqrt(sum(np.vdot(a, a).real for a in self.blocks)))

    def hermitized(self) -> "BlockMatrix":
        """Symmetrize each block, (X + X^dag) / 2."""
        return BlockMatrix(
            tuple((a + a.conj().swapaxes(-1, -2)) / 2.0 for a in self.blocks)
        )

    def hermiticity_defect(self) -> float:
        return float(
            max(
                (np.abs(a - a.conj().swapaxes(-1, -2)).max() if a.size else 0.0)
                for a in self.blocks
            )
        )

    def min_eigenvalue(self) -> float:
        vals = [np.linalg.eigvalsh(h).min() for h in self.hermitized().blocks if h.size]
        return float(min(vals))

    def allclose(self, other: "BlockMatrix", tol: float = 1e-10) -> bool:
        return all(
            np.allclose(a, b, atol=tol, rtol=0.0)
            for a, b in zip(self.blocks, other.blocks)
        )


def zeros(shapes) -> BlockMatrix:
    return BlockMatrix(tuple(np.zeros(s, dtype=complex) for s in shapes))


def vec_real(x: BlockMatrix) -> np.ndarray:
    """Stack real and imaginary parts of all entries into one real vector.

    The embedding is an isometry between the real Frobenius geometry on
    block matrices and the Euclidean dot product.
    """
    parts = []
    for b in x.blocks:
        flat = b.ravel()
        out = np.empty(2 * flat.size)
        out[0::2] = flat.real
        out[1::2] = flat.imag
        parts.append(out)
    return np.concatenate(parts) if parts else np.zeros(0)


def unvec_real(y: np.ndarray, shapes) -> BlockMatrix:
    blocks = []
    pos = 0
    for s in shapes:
        count = int(np.prod(s))
        chunk = y[pos : pos + 2 * count]
        blocks.append((chunk[0::2] + 1j * chunk[1::2]).reshape(s))
        pos += 2 * count
    return BlockMatrix(tuple(blocks))
