"""Moment-matrix layouts and their affine parametrization.

The relaxation variable is a block matrix of second and fourth moments
of fermionic operators.  Every entry is an affine function of a small
set of canonical moments: normal ordering rewrites the entry monomial,
the anti-commutation constraints tie conjugate keys together, and a
superselection rule (particle-number parity, or full number
conservation) removes blocks that vanish identically.  This module
builds that affine map explicitly,

    X = embed(p) = unvec(A p + b),

with `p` the stacked real/imaginary parts of the independent canonical
moments, and provides the least-squares inverse used by the alternating
projections.  Least-squares solves exploit that quartic-moment
coordinates never share an entry with each other, so the normal
equations reduce to a small Schur complement on the quadratic
coordinates.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import cho_factor, cho_solve

from .algebra import (
    Monomial,
    MomentExpression,
    adjoint,
    allowed_by_symmetry,
    canonical_term,
    canonicalize,
    filter_symmetry,
)
from .blockmat import BlockMatrix, unvec_real, vec_real

LEVELS = ("second", "fourth")
SYMMETRIES = ("parity", "number")


class UnsupportedTermError(ValueError):
    """A Hamiltonian monomial has no representation in the moment scope."""


# ---------------------------------------------------------------------------
# layouts


@dataclass(frozen=True)
class MomentBlock:
    label: str
    rows: tuple[Monomial, ...]


@dataclass(frozen=True)
class MomentLayout:
    """Operator basis of the moment matrix, one entry per PSD block."""

    n_sites: int
    level: str
    symmetry: str
    blocks: tuple[MomentBlock, ...]

    @property
    def dimension(self) -> int:
        return sum(len(b.rows) for b in self.blocks)

    @property
    def signature(self) -> tuple:
        return (
            "dense",
            self.n_sites,
            self.level,
            self.symmetry,
            tuple((b.label, len(b.rows)) for b in self.blocks),
        )

    def block_index(self, label: str) -> int:
        for i, b in enumerate(self.blocks):
            if b.label == label:
                return i
        raise KeyError(label)

    @property
    def block_shapes(self) -> tuple[tuple[int, int], ...]:
        return tuple((len(b.rows), len(b.rows)) for b in self.blocks)


def pair_grid(n_sites: int) -> list[tuple[int, int]]:
    """All ordered site pairs (k, l) in row-major order."""
    return [(k, l) for k in range(1, n_sites + 1) for l in range(1, n_sites + 1)]


def _single_rows(n_sites: int, dag: bool) -> tuple[Monomial, ...]:
    return tuple(((k, dag),) for k in range(1, n_sites + 1))


def _pair_rows(n_sites: int, dag_l: bool, dag_k: bool) -> tuple[Monomial, ...]:
    # Row operator for pair (k, l); its adjoint contributes the factors
    # on (k, l) in that written order, matching the entry conventions.
    return tuple(((l, dag_l), (k, dag_k)) for k, l in pair_grid(n_sites))


def index_map(n_sites: int, level: str = "second", symmetry: str = "parity") -> MomentLayout:
    """Moment-matrix layout for a chain of `n_sites` modes.

    Second moments use the basis {a_k, a_k^dag}; fourth moments add all
    ordered products of two such operators.  Under number conservation
    the off-diagonal couplings vanish and each operator family becomes
    its own PSD block (labels T, S, M, R, Q); with only parity imposed
    the quadratic and quartic sectors each form one coupled block.
    """
    if n_sites < 1:
        raise ValueError("need at least one site")
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    if symmetry not in SYMMETRIES:
        raise ValueError(f"symmetry must be one of {SYMMETRIES}")
    a_rows = _single_rows(n_sites, False)
    ad_rows = _single_rows(n_sites, True)
    pair = _pair_rows(n_sites, False, False)
    mixed = _pair_rows(n_sites, True, False)
    ddag = _pair_rows(n_sites, True, True)
    if level == "second":
        if symmetry == "number":
            blocks = (MomentBlock("T", a_rows), MomentBlock("S", ad_rows))
        else:
            blocks = (MomentBlock("quadratic", a_rows + ad_rows),)
    else:
        if symmetry == "number":
            blocks = (
                MomentBlock("T", a_rows),
                MomentBlock("S", ad_rows),
                MomentBlock("M", pair),
                MomentBlock("R", mixed),
                MomentBlock("Q", ddag),
            )
        else:
            blocks = (
                MomentBlock("quadratic", a_rows + ad_rows),
                MomentBlock("quartic", pair + mixed + ddag),
            )
    return MomentLayout(n_sites, level, symmetry, blocks)


def expected_param_count(n_sites: int, level: str, symmetry: str) -> int:
    """Closed-form count of independent real parameters (no translation
    symmetry).

    Every canonical key contributes one real coordinate on average:
    self-conjugate keys are real-valued, all other keys come in
    conjugate pairs carrying one complex value.  With K = C(N, 2):

      number/second:  N^2
      number/fourth:  N^2 + K^2
      parity/second:  N^2 + N(N-1)
      parity/fourth:  N^2 + N(N-1) + K^2 + 2 N C(N,3) + 2 C(N,4)
    """
    n = n_sites
    pairs = n * (n - 1) // 2
    triples = n * (n - 1) * (n - 2) // 6
    quads = n * (n - 1) * (n - 2) * (n - 3) // 24
    count = n**2
    if symmetry == "parity":
        count += n * (n - 1)
    if level == "fourth":
        count += pairs**2
        if symmetry == "parity":
            count += 2 * n * triples + 2 * quads
    return count


# ---------------------------------------------------------------------------
# parameter table


@dataclass(frozen=True)
class Resolution:
    """How a canonical key maps onto the stored parameters.

    value(key) = sign * conj^conjugate( value(reps[index]) ); a `None`
    index marks a key whose moment vanishes identically.
    """

    index: int | None
    sign: float
    conjugate: bool


_KIND_WIDTH = {"complex": 2, "real": 1, "imag": 1}


class ParamTable:
    """Independent real coordinates for the canonical moments in scope."""

    def __init__(self, n_sites: int, level: str, symmetry: str, reducer=None):
        self.n_sites = n_sites
        self.level = level
        self.symmetry = symmetry
        self.max_order = 2 if level == "second" else 4
        self._reduce = reducer or (lambda key: (key, 1.0))
        self._orbit_cache: dict[Monomial, tuple[Monomial, float] | None] = {}
        self._registered: set[Monomial] = set()
        self._final: dict[Monomial, Resolution] = {}
        self.reps: tuple[Monomial, ...] = ()
        self.kinds: tuple[str, ...] = ()
        self.offsets: tuple[int, ...] = ()
        self.n_coords = 0
        self._frozen = False

    # -- scope ------------------------------------------------------------

    def check_scope(self, key: Monomial) -> None:
        if len(key) > self.max_order:
            raise UnsupportedTermError(
                f"key of order {len(key)} outside {self.level}-moment scope"
            )
        if not allowed_by_symmetry(key, self.symmetry):
            raise UnsupportedTermError(
                f"key {key} forbidden under {self.symmetry} symmetry"
            )

    def _orbit(self, key: Monomial) -> tuple[Monomial, float] | None:
        try:
            return self._orbit_cache[key]
        except KeyError:
            reduced = self._reduce(key)
            self._orbit_cache[key] = reduced
            return reduced

    # -- construction -----------------------------------------------------

    def register(self, key: Monomial) -> None:
        assert not self._frozen
        self.check_scope(key)
        reduced = self._orbit(key)
        if reduced is not None:
            self._registered.add(reduced[0])

    def finalize(self) -> None:
        assert not self._frozen
        pair_of: dict[Monomial, tuple[Monomial, float]] = {}
        for rep in self._registered:
            adj_key, adj_sign = canonical_term(adjoint(rep))
            reduced = self._orbit(adj_key)
            if reduced is None:
                # conjugate orbit vanishes, hence so does this one
                self._orbit_cache[rep] = None
                continue
            partner, orbit_sign = reduced
            pair_of[rep] = (partner, adj_sign * orbit_sign)
        finals: dict[Monomial, str] = {}
        for rep, (partner, s) in pair_of.items():
            if partner == rep:
                finals[rep] = "real" if s > 0 else "imag"
            else:
                finals.setdefault(min(rep, partner), "complex")
        reps = tuple(sorted(finals))
        kinds = tuple(finals[r] for r in reps)
        offsets = []
        total = 0
        for kind in kinds:
            offsets.append(total)
            total += _KIND_WIDTH[kind]
        index = {r: i for i, r in enumerate(reps)}
        for rep, (partner, s) in pair_of.items():
            if rep in index:
                self._final[rep] = Resolution(index[rep], 1.0, False)
            else:
                self._final[rep] = Resolution(index[partner], s, True)
        self.reps, self.kinds, self.offsets = reps, kinds, tuple(offsets)
        self.n_coords = total
        self._frozen = True

    # -- queries ------------------------------------------------------------

    def reduce(self, key: Monomial) -> tuple[Monomial, float] | None:
        """Orbit form of a key: value(key) = sign * value(rep), None if zero."""
        self.check_scope(key)
        return self._orbit(key)

    def resolve(self, key: Monomial) -> Resolution:
        self.check_scope(key)
        reduced = self._orbit(key)
        if reduced is None:
            return Resolution(None, 0.0, False)
        rep, sign = reduced
        try:
            base = self._final[rep]
        except KeyError:
            raise UnsupportedTermError(
                f"key {key} not covered by this moment layout"
            ) from None
        return Resolution(base.index, sign * base.sign, base.conjugate)

    def quartic_coord_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_coords, dtype=bool)
        for rep, kind, off in zip(self.reps, self.kinds, self.offsets):
            if len(rep) == 4:
                mask[off : off + _KIND_WIDTH[kind]] = True
        return mask

    def rep_values(self, params: np.ndarray) -> np.ndarray:
        """Complex value of each representative key."""
        out = np.zeros(len(self.reps), dtype=complex)
        for i, (kind, off) in enumerate(zip(self.kinds, self.offsets)):
            if kind == "complex":
                out[i] = params[off] + 1j * params[off + 1]
            elif kind == "real":
                out[i] = params[off]
            else:
                out[i] = 1j * params[off]
        return out

    def params_from_values(self, values: dict[Monomial, complex]) -> np.ndarray:
        """Parameter vector matching given representative values.

        Missing representatives default to zero; imaginary parts that a
        real-kind representative cannot store are dropped (and vice
        versa), which only matters for inconsistent input.
        """
        p = np.zeros(self.n_coords)
        for rep, kind, off in zip(self.reps, self.kinds, self.offsets):
            v = complex(values.get(rep, 0.0))
            if kind == "complex":
                p[off], p[off + 1] = v.real, v.imag
            elif kind == "real":
                p[off] = v.real
            else:
                p[off] = v.imag
        return p

    def key_value(self, key: Monomial, params: np.ndarray) -> complex:
        res = self.resolve(key)
        if res.index is None:
            return 0.0
        kind, off = self.kinds[res.index], self.offsets[res.index]
        if kind == "complex":
            v = params[off] + 1j * params[off + 1]
        elif kind == "real":
            v = complex(params[off])
        else:
            v = 1j * params[off]
        return res.sign * (v.conjugate() if res.conjugate else v)

    def expression_value(self, expr: MomentExpression, params: np.ndarray) -> complex:
        return expr.constant + sum(
            c * self.key_value(k, params) for k, c in expr.terms.items()
        )

    def rows_for_expression(self, expr: MomentExpression):
        """Real-linear forms of an expression's real and imaginary parts.

        Returns (cols_re, coeffs_re, const_re, cols_im, coeffs_im,
        const_im); the imaginary constant is always zero because
        normal-ordering coefficients are real.
        """
        cols_re: list[int] = []
        coeffs_re: list[float] = []
        cols_im: list[int] = []
        coeffs_im: list[float] = []
        for key, c in expr.terms.items():
            res = self.resolve(key)
            if res.index is None:
                continue
            kind, off = self.kinds[res.index], self.offsets[res.index]
            s = c * res.sign
            flip = -1.0 if res.conjugate else 1.0
            if kind == "complex":
                cols_re.append(off)
                coeffs_re.append(s)
                cols_im.append(off + 1)
                coeffs_im.append(s * flip)
            elif kind == "real":
                cols_re.append(off)
                coeffs_re.append(s)
            else:
                cols_im.append(off)
                coeffs_im.append(s * flip)
        return cols_re, coeffs_re, expr.constant, cols_im, coeffs_im, 0.0


# ---------------------------------------------------------------------------
# least squares on the normal equations


class NormalEquationsSolver:
    """Solve (A^T A) x = r exploiting the quartic-coordinate structure.

    Quartic coordinates appear in disjoint sets of rows, so their
    diagonal decouples and a dense Schur complement on the (few)
    quadratic coordinates remains.  Falls back to a dense factorization
    when that structure is absent.
    """

    def __init__(self, A: sparse.csr_matrix, quartic_mask: np.ndarray):
        ata = (A.T @ A).tocsc()
        n = ata.shape[0]
        q = np.asarray(quartic_mask, dtype=bool)
        t = ~q
        self._q, self._t = q, t
        off_diag = ata[q][:, q].copy()
        off_diag.setdiag(0.0)
        if q.any() and off_diag.count_nonzero() == 0:
            self._mode = "schur"
            self._d = ata.diagonal()[q]
            if np.any(self._d <= 0):
                raise ValueError("rank-deficient quartic coordinates")
            self._C = ata[t][:, q].tocsr()
            dense_tt = ata[t][:, t].toarray()
            S = dense_tt - (self._C.multiply(1.0 / self._d) @ self._C.T).toarray()
            self._cho = cho_factor(S)
        else:
            self._mode = "dense"
            self._cho = cho_factor(ata.toarray())

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._mode == "dense":
            return cho_solve(self._cho, rhs)
        r_t, r_q = rhs[self._t], rhs[self._q]
        x = np.empty_like(rhs)
        y = r_t - self._C @ (r_q / self._d)
        x_t = cho_solve(self._cho, y)
        x[self._t] = x_t
        x[self._q] = (r_q - self._C.T @ x_t) / self._d
        return x


# ---------------------------------------------------------------------------
# dense embedding


class MomentEmbedding:
    """Affine map from independent moment parameters to the block matrix."""

    def __init__(self, layout: MomentLayout):
        self.layout = layout
        self.table = ParamTable(layout.n_sites, layout.level, layout.symmetry)
        self.homes: dict[Monomial, tuple[int, int, int]] = {}
        exprs: list[list[MomentExpression]] = []
        for bi, block in enumerate(layout.blocks):
            ops = block.rows
            adjs = [adjoint(op) for op in ops]
            entries = []
            for i, left in enumerate(adjs):
                for j, right in enumerate(ops):
                    expr = filter_symmetry(canonicalize(left + right), layout.symmetry)
                    entries.append(expr)
                    for key in expr.terms:
                        self.table.register(key)
                    if expr.constant == 0.0 and len(expr.terms) == 1:
                        key, coeff = next(iter(expr.terms.items()))
                        reduced = self.table.reduce(key)
                        if reduced is not None and abs(coeff) == 1.0:
                            rep, sign = reduced
                            self.homes.setdefault(rep, (bi, i, j, coeff * sign))
            exprs.append(entries)
        self.table.finalize()

        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        n_rows = 2 * sum(len(b.rows) ** 2 for b in layout.blocks)
        b_vec = np.zeros(n_rows)
        base = 0
        for bi, block in enumerate(layout.blocks):
            for t, expr in enumerate(exprs[bi]):
                r_re, r_im = base + 2 * t, base + 2 * t + 1
                c_re, k_re, b_re, c_im, k_im, b_im = self.table.rows_for_expression(expr)
                rows.extend([r_re] * len(c_re))
                cols.extend(c_re)
                vals.extend(k_re)
                rows.extend([r_im] * len(c_im))
                cols.extend(c_im)
                vals.extend(k_im)
                b_vec[r_re] = b_re
                b_vec[r_im] = b_im
            base += 2 * len(block.rows) ** 2
        self.A = sparse.coo_matrix(
            (vals, (rows, cols)), shape=(n_rows, self.table.n_coords)
        ).tocsr()
        self.b = b_vec
        self._solver = NormalEquationsSolver(self.A, self.table.quartic_coord_mask())

    # -- interface shared with the translation-invariant embedding --------

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

    def embed(self, params: np.ndarray) -> BlockMatrix:
        return unvec_real(self.A @ params + self.b, self.block_shapes)

    def extract(self, x: BlockMatrix) -> np.ndarray:
        return self._solver.solve(self.A.T @ (vec_real(x) - self.b))

    def project(self, x: BlockMatrix) -> BlockMatrix:
        """Orthogonal projection onto the affine constraint set."""
        return self.embed(self.extract(x))

    def gradient_from_terms(
        self, items: Sequence[tuple[Monomial, complex]]
    ) -> BlockMatrix:
        """Gradient matrix G with Re tr[G^dag X] = sum of Re(coeff <key>).

        Each key is steered to a stored entry that equals (up to sign)
        the key's moment, split Hermitian-symmetrically between the
        entry and its mirror image.
        """
        g = self.zero_matrix()
        for key, coeff in items:
            reduced = self.table.reduce(key)
            if reduced is None:
                continue
            rep, sign = reduced
            try:
                bi, i, j, factor = self.homes[rep]
            except KeyError:
                raise UnsupportedTermError(
                    f"no stored entry holds the moment {key}"
                ) from None
            v = coeff * sign / factor
            g.blocks[bi][i, j] += np.conj(v) / 2.0
            g.blocks[bi][j, i] += v / 2.0
        return g

    def value_lookup(self, params: np.ndarray) -> Callable[[Monomial], complex]:
        """Evaluator of arbitrary monomial moments at a parameter vector."""

        def value(monomial: Monomial) -> complex:
            expr = filter_symmetry(
                canonicalize(monomial), self.layout.symmetry
            )
            return self.table.expression_value(expr, params)

        return value


def half_filling_params(table: ParamTable) -> np.ndarray:
    """Parameters of the maximally mixed half-filled reference state.

    Every on-site density moment is 1/2 and all other moments vanish,
    which embeds to one half of the identity matrix: a strictly
    positive definite interior point of the feasible region.
    """
    values = {}
    for rep in table.reps:
        if (
            len(rep) == 2
            and rep[0][1]
            and not rep[1][1]
            and rep[0][0] == rep[1][0]
        ):
            values[rep] = 0.5
    return table.params_from_values(values)


# ---------------------------------------------------------------------------
# objectives


@dataclass(frozen=True)
class Objective:
    """Energy functional E(X) = Re tr[G^dag X] + c on a moment layout."""

    matrix: BlockMatrix
    constant: float
    fingerprint: tuple

    def energy(self, x: BlockMatrix) -> float:
        return self.matrix.inner(x) + self.constant


def _gradient_hash(g: BlockMatrix) -> str:
    h = hashlib.sha256()
    for blk in g.blocks:
        h.update(np.round(blk, 9).tobytes())
    return h.hexdigest()[:16]


def objective_from_hamiltonian(spec, embedding) -> Objective:
    """Translate a HamiltonianSpec into a gradient matrix and constant.

    Every monomial is normal ordered; each canonical key lands on its
    designated entry (Hermitian-symmetrized), so the produced gradient
    is independent of the input term ordering.  A term whose keys fall
    outside the layout's scope (wrong order or broken symmetry) raises
    UnsupportedTermError.
    """
    if spec.n_sites != embedding.layout.n_sites:
        raise ValueError("Hamiltonian and layout disagree on system size")
    defect = spec.hermiticity_defect()
    if defect > 1e-10:
        raise ValueError(f"Hamiltonian is not Hermitian (defect {defect:.2e})")
    total_const = complex(spec.constant)
    items: list[tuple[Monomial, complex]] = []
    for mono, coeff in spec.terms:
        expr = canonicalize(mono)
        total_const += coeff * expr.constant
        for key, kc in expr.terms.items():
            embedding.table.check_scope(key)
            items.append((key, coeff * kc))
    if abs(total_const.imag) > 1e-10:
        raise ValueError("constant part of a Hermitian Hamiltonian must be real")
    g = embedding.gradient_from_terms(items)
    fp = (embedding.signature, round(total_const.real, 9), _gradient_hash(g))
    return Objective(matrix=g, constant=total_const.real, fingerprint=fp)
