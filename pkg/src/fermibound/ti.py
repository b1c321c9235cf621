"""Translation-invariant moment embeddings on a ring.

On a periodic chain the moment matrix is block circulant: grouping the
rows by operator shape (single creation/annihilation, or a two-factor
product at a fixed site offset) makes every sub-block a circulant in
the site index.  The discrete Fourier transform then block-diagonalizes
the whole matrix into one small sector per momentum, so both storage
and the semidefinite projection shrink by a factor of the system size.

Moments are reduced to one representative per translation orbit.  The
cyclic shift reorders the factors of a canonical monomial, so each
translate carries the parity sign of that reordering; orbits whose
representative reappears with both signs are identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .algebra import Monomial, adjoint, canonicalize, filter_symmetry
from .blockmat import BlockMatrix
from .moments import (
    LEVELS,
    SYMMETRIES,
    MomentLayout,
    NormalEquationsSolver,
    ParamTable,
    UnsupportedTermError,
    index_map,
)


def _wrap(site: int, n_sites: int) -> int:
    return (site - 1) % n_sites + 1


def _sort_sign(seq) -> float:
    sign = 1.0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def ti_reducer(n_sites: int):
    """Orbit reduction of canonical keys under cyclic translation.

    Returns a callable mapping a canonical key to ``(rep, sign)`` with
    value(key) = sign * value(rep) for every translation-invariant
    state, or ``None`` when the orbit is forced to zero by a sign
    conflict (the same translate appearing with both parities).
    """

    def reduce(key: Monomial):
        dag = [s for s, d in key if d]
        und = [s for s, d in key if not d]
        seen: dict[Monomial, float] = {}
        for shift in range(n_sites):
            sd = [(s - 1 + shift) % n_sites + 1 for s in dag]
            su = [(s - 1 + shift) % n_sites + 1 for s in und]
            sign = _sort_sign(sd) * _sort_sign(su)
            cand = tuple((s, True) for s in sorted(sd)) + tuple(
                (s, False) for s in sorted(su)
            )
            prev = seen.get(cand)
            if prev is None:
                seen[cand] = sign
            elif prev != sign:
                return None
        rep = min(seen)
        return rep, seen[rep]

    return reduce


# ---------------------------------------------------------------------------
# layout


@dataclass(frozen=True)
class RowGroup:
    """A translation orbit of row operators: a kind plus a site offset."""

    kind: str
    offset: int = 0

    def op_at(self, site: int, n_sites: int) -> Monomial:
        if self.kind == "a":
            return ((site, False),)
        if self.kind == "adag":
            return ((site, True),)
        partner = _wrap(site + self.offset, n_sites)
        if self.kind == "pair":
            return ((partner, False), (site, False))
        if self.kind == "mixed":
            return ((partner, True), (site, False))
        if self.kind == "dd":
            return ((partner, True), (site, True))
        raise ValueError(f"unknown row kind {self.kind!r}")


@dataclass(frozen=True)
class TIFamily:
    label: str
    rowgroups: tuple[RowGroup, ...]


@dataclass(frozen=True)
class TILayout:
    """Sector-block structure of a translation-invariant moment matrix."""

    n_sites: int
    level: str
    symmetry: str
    families: tuple[TIFamily, ...]

    @property
    def signature(self) -> tuple:
        return (
            "ti",
            self.n_sites,
            self.level,
            self.symmetry,
            tuple((f.label, len(f.rowgroups)) for f in self.families),
        )

    @property
    def block_shapes(self) -> tuple[tuple[int, int, int], ...]:
        n = self.n_sites
        return tuple((n, len(f.rowgroups), len(f.rowgroups)) for f in self.families)


def ti_index_map(
    n_sites: int, level: str = "second", symmetry: str = "parity"
) -> TILayout:
    """Row groups of the sector decomposition, mirroring `index_map`."""
    if n_sites < 1:
        raise ValueError("need at least one site")
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    if symmetry not in SYMMETRIES:
        raise ValueError(f"symmetry must be one of {SYMMETRIES}")
    a = RowGroup("a")
    ad = RowGroup("adag")
    pairs = tuple(RowGroup("pair", d) for d in range(n_sites))
    mixes = tuple(RowGroup("mixed", d) for d in range(n_sites))
    dds = tuple(RowGroup("dd", d) for d in range(n_sites))
    if level == "second":
        if symmetry == "number":
            families = (TIFamily("T", (a,)), TIFamily("S", (ad,)))
        else:
            families = (TIFamily("quadratic", (a, ad)),)
    else:
        if symmetry == "number":
            families = (
                TIFamily("T", (a,)),
                TIFamily("S", (ad,)),
                TIFamily("M", pairs),
                TIFamily("R", mixes),
                TIFamily("Q", dds),
            )
        else:
            families = (
                TIFamily("quadratic", (a, ad)),
                TIFamily("quartic", pairs + mixes + dds),
            )
    return TILayout(n_sites, level, symmetry, families)


def ti_pair_order(n_sites: int) -> list[tuple[int, int]]:
    """Site pairs in row-group order: grouped by offset, then by site."""
    return [
        (i, _wrap(i + d, n_sites))
        for d in range(n_sites)
        for i in range(1, n_sites + 1)
    ]


def reorder_permutation(n_sites: int) -> np.ndarray:
    """Permutation taking row-major pair indices into offset grouping.

    Entry p of the result is the row-major index of the p-th pair in
    `ti_pair_order`, so applying it to rows and columns of a pair-indexed
    matrix groups equal-offset pairs into contiguous circulant blocks.
    """
    return np.array(
        [(i - 1) * n_sites + (l - 1) for i, l in ti_pair_order(n_sites)],
        dtype=int,
    )


def dft_unitary(n_sites: int) -> np.ndarray:
    """Unitary DFT matrix diagonalizing circulants on the ring."""
    j = np.arange(n_sites)
    return np.exp(-2j * np.pi * np.outer(j, j) / n_sites) / np.sqrt(n_sites)


# ---------------------------------------------------------------------------
# embedding


class TIEmbedding:
    """Affine parametrization of the sector blocks.

    Entries are generated per ordered row-group pair by the length-N
    vector c with c[delta] = entry(row at site 1+delta, column at site
    1); sector f of that sub-block is the inverse DFT sum
    sum_delta c[delta] exp(+2 pi i delta f / N).  The affine system is
    assembled over generator entries, which is exact because the
    sector transform scales every generator uniformly.
    """

    def __init__(self, layout: TILayout):
        self.layout = layout
        n = layout.n_sites
        self.table = ParamTable(
            n, layout.level, layout.symmetry, reducer=ti_reducer(n)
        )
        self.homes: dict[Monomial, tuple[int, int, int, int, float]] = {}
        fam_exprs = []
        for fi, fam in enumerate(layout.families):
            col_ops = [rg.op_at(1, n) for rg in fam.rowgroups]
            exprs = []
            for ai, rga in enumerate(fam.rowgroups):
                for bi in range(len(fam.rowgroups)):
                    for delta in range(n):
                        row_op = rga.op_at(_wrap(1 + delta, n), n)
                        expr = filter_symmetry(
                            canonicalize(adjoint(row_op) + col_ops[bi]),
                            layout.symmetry,
                        )
                        exprs.append(expr)
                        for key in expr.terms:
                            self.table.register(key)
                        if expr.constant == 0.0 and len(expr.terms) == 1:
                            key, coeff = next(iter(expr.terms.items()))
                            reduced = self.table.reduce(key)
                            if reduced is not None and abs(coeff) == 1.0:
                                rep, sign = reduced
                                self.homes.setdefault(
                                    rep, (fi, ai, bi, delta, coeff * sign)
                                )
            fam_exprs.append(exprs)
        self.table.finalize()

        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        n_rows = 2 * n * sum(len(f.rowgroups) ** 2 for f in layout.families)
        b_vec = np.zeros(n_rows)
        base = 0
        for fi, fam in enumerate(layout.families):
            for t, expr in enumerate(fam_exprs[fi]):
                r_re, r_im = base + 2 * t, base + 2 * t + 1
                c_re, k_re, b_re, c_im, k_im, b_im = self.table.rows_for_expression(
                    expr
                )
                rows.extend([r_re] * len(c_re))
                cols.extend(c_re)
                vals.extend(k_re)
                rows.extend([r_im] * len(c_im))
                cols.extend(c_im)
                vals.extend(k_im)
                b_vec[r_re] = b_re
                b_vec[r_im] = b_im
            base += 2 * n * len(fam.rowgroups) ** 2
        self.A = sparse.coo_matrix(
            (vals, (rows, cols)), shape=(n_rows, self.table.n_coords)
        ).tocsr()
        self.b = b_vec
        self._solver = NormalEquationsSolver(self.A, self.table.quartic_coord_mask())

    # -- shared embedding interface ----------------------------------------

    @property
    def n_sites(self) -> int:
        return self.layout.n_sites

    @property
    def level(self) -> str:
        return self.layout.level

    @property
    def symmetry(self) -> str:
        return self.layout.symmetry

    @property
    def n_params(self) -> int:
        return self.table.n_coords

    @property
    def signature(self) -> tuple:
        return self.layout.signature

    @property
    def block_shapes(self):
        return self.layout.block_shapes

    def zero_matrix(self) -> BlockMatrix:
        return BlockMatrix(
            tuple(np.zeros(s, dtype=complex) for s in self.block_shapes)
        )

    def _generators(self, y: np.ndarray) -> list[np.ndarray]:
        """Split the stacked generator vector into complex (m, m, N) arrays."""
        n = self.layout.n_sites
        out = []
        pos = 0
        for fam in self.layout.families:
            m = len(fam.rowgroups)
            size = 2 * m * m * n
            arr = y[pos : pos + size].reshape(m, m, n, 2)
            out.append(arr[..., 0] + 1j * arr[..., 1])
            pos += size
        return out

    def _sectors(self, gens: list[np.ndarray]) -> BlockMatrix:
        n = self.layout.n_sites
        blocks = []
        for g in gens:
            sect = n * np.fft.ifft(g, axis=-1)
            blocks.append(np.ascontiguousarray(np.moveaxis(sect, -1, 0)))
        return BlockMatrix(tuple(blocks))

    def _from_sectors(self, x: BlockMatrix) -> np.ndarray:
        n = self.layout.n_sites
        parts = []
        for blk in x.blocks:
            g = np.fft.fft(np.moveaxis(blk, 0, -1), axis=-1) / n
            arr = np.empty(g.shape + (2,))
            arr[..., 0] = g.real
            arr[..., 1] = g.imag
            parts.append(arr.reshape(-1))
        return np.concatenate(parts)

    def embed(self, params: np.ndarray) -> BlockMatrix:
        return self._sectors(self._generators(self.A @ params + self.b))

    def extract(self, x: BlockMatrix) -> np.ndarray:
        return self._solver.solve(self.A.T @ (self._from_sectors(x) - self.b))

    def project(self, x: BlockMatrix) -> BlockMatrix:
        """Orthogonal projection onto the affine constraint set."""
        return self.embed(self.extract(x))

    def gradient_from_terms(self, items) -> BlockMatrix:
        """Sector-space gradient G with <G, X> = sum of Re(coeff <key>)."""
        n = self.layout.n_sites
        gens = [
            np.zeros((len(f.rowgroups), len(f.rowgroups), n), dtype=complex)
            for f in self.layout.families
        ]
        for key, coeff in items:
            reduced = self.table.reduce(key)
            if reduced is None:
                continue
            rep, sign = reduced
            try:
                fi, ai, bi, delta, factor = self.homes[rep]
            except KeyError:
                raise UnsupportedTermError(
                    f"no stored entry holds the moment {key}"
                ) from None
            v = coeff * sign / factor
            gens[fi][ai, bi, delta] += np.conj(v) / (2 * n)
            gens[fi][bi, ai, (-delta) % n] += v / (2 * n)
        return self._sectors(gens)

    def value_lookup(self, params: np.ndarray):
        """Evaluator of arbitrary monomial moments at a parameter vector."""

        def value(monomial: Monomial) -> complex:
            expr = filter_symmetry(
                canonicalize(monomial), self.layout.symmetry
            )
            return self.table.expression_value(expr, params)

        return value

    # -- dense reconstruction ----------------------------------------------

    def _dense_layout(self) -> MomentLayout:
        return index_map(
            self.layout.n_sites, self.layout.level, self.layout.symmetry
        )

    def _dense_permutation(self, fam: TIFamily, rows) -> np.ndarray:
        n = self.layout.n_sites
        group_index = {
            (rg.kind, rg.offset): gi for gi, rg in enumerate(fam.rowgroups)
        }
        kind_of = {
            (False, False): "pair",
            (True, False): "mixed",
            (True, True): "dd",
        }
        perm = np.empty(len(rows), dtype=int)
        for pos, op in enumerate(rows):
            if len(op) == 1:
                site, dag = op[0]
                gi = group_index[("adag" if dag else "a", 0)]
            else:
                (l, dl), (k, dk) = op
                site = k
                gi = group_index[(kind_of[(dl, dk)], (l - k) % n)]
            perm[pos] = gi * n + (site - 1)
        return perm

    def dense_matrix(self, x: BlockMatrix) -> BlockMatrix:
        """Expand sector blocks to the dense layout of `index_map`.

        Intended for cross-checks at small sizes; the result uses the
        same block order and row conventions as the dense embedding.
        """
        n = self.layout.n_sites
        dense = self._dense_layout()
        blocks = []
        diff = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        for fam, blk in zip(self.layout.families, x.blocks):
            m = len(fam.rowgroups)
            gens = np.fft.fft(np.moveaxis(blk, 0, -1), axis=-1) / n
            big = np.empty((m * n, m * n), dtype=complex)
            for a in range(m):
                for b in range(m):
                    big[a * n : (a + 1) * n, b * n : (b + 1) * n] = gens[a, b][diff]
            rows = dense.blocks[dense.block_index(fam.label)].rows
            perm = self._dense_permutation(fam, rows)
            blocks.append(big[np.ix_(perm, perm)])
        return BlockMatrix(tuple(blocks))


# ---------------------------------------------------------------------------
# warm starts


def rep_signature(rep: Monomial, n_sites: int) -> tuple:
    """Size-free shape of an orbit representative.

    Displacements are taken relative to the first factor's site in the
    minimal image (-N/2, N/2], ties resolved to +N/2, so matching
    shapes across different ring sizes identifies moments of the same
    local operator pattern.
    """
    base = rep[0][0]
    out = []
    for site, dag in rep:
        d = (site - base) % n_sites
        if d > n_sites // 2:
            d -= n_sites
        out.append((d, dag))
    return tuple(out)


def extend_rep_values(
    values: dict[Monomial, complex], source_n: int, target_table: ParamTable
) -> dict[Monomial, complex]:
    """Match source representative values onto a target table's reps."""
    by_signature = {
        rep_signature(rep, source_n): v for rep, v in values.items()
    }
    out = {}
    for rep in target_table.reps:
        v = by_signature.get(rep_signature(rep, target_table.n_sites))
        if v is not None:
            out[rep] = v
    return out


def warm_start_extend(
    params: np.ndarray, source: TIEmbedding, target: TIEmbedding
) -> np.ndarray:
    """Transplant converged moments onto a larger ring.

    Representatives are matched by their displacement signature; moments
    with no counterpart on the source ring start at zero.
    """
    if (source.level, source.symmetry) != (target.level, target.symmetry):
        raise ValueError("embeddings must share level and symmetry")
    values = dict(zip(source.table.reps, source.table.rep_values(params)))
    matched = extend_rep_values(values, source.n_sites, target.table)
    return target.table.params_from_values(matched)
