"""Lie algebras of skew endomorphisms and their real representation theory.

Skew endomorphisms are plain square numpy arrays (exact ``object`` arrays of
``Fraction`` or float arrays).  Subspaces are described by orthogonal
projectors, which stay rational far more often than orthonormal bases do.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .exterior import Multivector, derive

__all__ = [
    "IndeterminateSplit",
    "LieSubalgebra",
    "Subspace",
    "SubspaceSplit",
    "Fingerprint",
    "skew_basis",
    "skew_coords",
    "from_skew_coords",
    "commutator",
    "lie_closure",
    "stabilizer_algebra",
    "annihilated_vectors",
    "invariant_decomposition",
    "standard_split",
    "fingerprint",
    "identify_algebra",
    "conjugate",
]


class IndeterminateSplit(RuntimeError):
    """Eigenvalue clusters of a commutant element could not be separated."""


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def skew_basis(n: int, exact: bool = True) -> list[np.ndarray]:
    """Endomorphisms of the 2-forms e^{ij}, i<j, in lexicographic order."""
    out = []
    for i, j in itertools.combinations(range(n), 2):
        E = la.zeros((n, n), exact)
        E[j, i] = 1
        E[i, j] = -1
        out.append(E)
    return out


def skew_coords(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    return np.array([A[j, i] for i, j in itertools.combinations(range(n), 2)],
                    dtype=A.dtype)


def from_skew_coords(n: int, c: Sequence) -> np.ndarray:
    c = np.asarray(c)
    exact = la.is_exact_array(c)
    A = la.zeros((n, n), exact)
    for k, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        A[j, i] = c[k]
        A[i, j] = -c[k]
    return A


def _is_exact_list(mats: Iterable[np.ndarray]) -> bool:
    return all(la.is_exact_array(np.asarray(m)) for m in mats)


def _as_dtype(A: np.ndarray, exact: bool) -> np.ndarray:
    A = np.asarray(A)
    if exact:
        return la.exact_array(A) if not la.is_exact_array(A) else A
    return la.float_array(A)


def _integer_scaled(A: np.ndarray) -> tuple[np.ndarray, int] | None:
    """(d*A as int64, d) for an exact A whose scaled entries are small, else None.

    Products of such matrices in dimension <= 10 cannot overflow, and integer
    matrix products are far cheaper than products of Fractions.
    """
    d = 1
    for x in A.reshape(-1):
        d = d * x.denominator // np.gcd(d, x.denominator)
    scaled = [int(x * d) for x in A.reshape(-1)]
    if any(abs(v) >= 2**24 for v in scaled):
        return None
    return np.array(scaled, dtype=np.int64).reshape(A.shape), d


def _integer_list(mats: Sequence[np.ndarray]):
    out = []
    for A in mats:
        r = _integer_scaled(A)
        if r is None:
            return None
        out.append(r)
    return out


def _solve_commuting(mats: list[np.ndarray], unknowns: list[np.ndarray],
                     extra: Sequence[np.ndarray] = (), tol: float = DEFAULT_TOL):
    """Coefficient vectors c with sum c_k U_k commuting with every matrix in mats
    and annihilated by right multiplication with every matrix in ``extra``."""
    exact = _is_exact_list(mats) and _is_exact_list(unknowns) and _is_exact_list(extra)
    if exact and unknowns:
        ints = [_integer_list(x) for x in (mats, unknowns, extra)]
        if all(r is not None for r in ints):
            return _solve_commuting_int(*ints)
    cols = []
    for U in unknowns:
        parts = [commutator(U, M).reshape(-1) for M in mats]
        parts += [(U @ X).reshape(-1) for X in extra]
        cols.append(np.concatenate(parts) if parts else np.zeros(0))
    if not cols:
        return []
    M = np.array(cols, dtype=object if exact else float).T
    if M.shape[0] == 0:
        return list(la.eye(len(unknowns), exact))
    return la.nullspace(M, tol)


def _solve_commuting_int(mats, unknowns, extra):
    cols = []
    for U, _ in unknowns:
        parts = [(U @ M - M @ U).reshape(-1) for M, _ in mats]
        parts += [(U @ X).reshape(-1) for X, _ in extra]
        cols.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
    M = np.array(cols, dtype=np.int64).T
    elim = la.SparseEliminator(len(unknowns))
    for row in M:
        nz = np.nonzero(row)[0]
        if len(nz):
            elim.add({int(j): Fraction(int(row[j])) for j in nz})
    scales = [Fraction(d) for _, d in unknowns]
    return [np.array([c * s for c, s in zip(v, scales)], dtype=object)
            for v in elim.nullspace()]


@dataclass(frozen=True)
class Fingerprint:
    dim: int
    derived_dim: int
    center_dim: int
    blocks: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"dim": self.dim, "derived_dim": self.derived_dim,
                "center_dim": self.center_dim, "blocks": list(self.blocks)}


class LieSubalgebra:
    """A bracket-closed subspace of so(n), stored by a linearly independent basis."""

    def __init__(self, n: int, basis: Sequence[np.ndarray], tol: float = DEFAULT_TOL,
                 check: bool = True):
        self.n = n
        self.tol = tol
        mats = [np.asarray(B) for B in basis]
        self.exact = _is_exact_list(mats)
        span = la.Span(n * (n - 1) // 2, self.exact, tol)
        kept = []
        for B in mats:
            if B.shape != (n, n):
                raise ValueError(f"expected {n}x{n} matrices, got {B.shape}")
            if not la.array_is_zero(B + B.T, tol):
                raise ValueError("basis element is not skew-symmetric")
            if span.add(skew_coords(B)):
                kept.append(B)
        self.basis = kept
        self._span = span
        self._fingerprint: Fingerprint | None = None
        self._blocks: list[Subspace] | None = None
        if check and not self.is_closed():
            raise ValueError("basis is not closed under the bracket")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return self.dim

    def contains(self, A: np.ndarray) -> bool:
        return self._span.contains(skew_coords(np.asarray(A)))

    def _brackets(self):
        """Brackets of basis pairs, each up to a positive scalar factor."""
        ints = _integer_list(self.basis) if self.exact else None
        if ints is None:
            for A, B in itertools.combinations(self.basis, 2):
                yield commutator(A, B)
            return
        for (A, _), (B, _) in itertools.combinations(ints, 2):
            yield np.array(A @ B - B @ A, dtype=object)

    def is_closed(self) -> bool:
        return all(self.contains(C) for C in self._brackets())

    def derived_dim(self) -> int:
        span = la.Span(self.n * (self.n - 1) // 2, self.exact, self.tol)
        for C in self._brackets():
            span.add(skew_coords(C))
        return len(span)

    def center_dim(self) -> int:
        if not self.basis:
            return 0
        return len(_solve_commuting(self.basis, self.basis, tol=self.tol))

    def is_subalgebra_of(self, other: "LieSubalgebra") -> bool:
        return all(other.contains(A) for A in self.basis)

    def to_float(self) -> "LieSubalgebra":
        return LieSubalgebra(self.n, [la.float_array(B) for B in self.basis], self.tol, check=False)

    def to_json(self) -> list:
        out = []
        for B in self.basis:
            if self.exact:
                out.append([[str(Fraction(x)) for x in row] for row in B])
            else:
                out.append([[float(x) for x in row] for row in B])
        return out

    @classmethod
    def from_json(cls, data: list, tol: float = DEFAULT_TOL) -> "LieSubalgebra":
        mats = []
        for M in data:
            if any(isinstance(x, str) for row in M for x in row):
                mats.append(la.exact_array([[la.rational(x) if isinstance(x, str) else x
                                             for x in row] for row in M]))
            elif all(isinstance(x, int) for row in M for x in row):
                mats.append(la.exact_array(M))
            else:
                mats.append(la.float_array(M))
        if not mats:
            raise ValueError("empty algebra needs an explicit dimension")
        exact = _is_exact_list(mats)
        return cls(len(mats[0]), [_as_dtype(M, exact) for M in mats], tol)

    def blocks(self, rng: np.random.Generator | None = None) -> list["Subspace"]:
        if self._blocks is None:
            self._blocks = invariant_decomposition(self, rng)
        return self._blocks

    def fingerprint(self) -> Fingerprint:
        if self._fingerprint is None:
            self._fingerprint = fingerprint(self)
        return self._fingerprint

    def __repr__(self) -> str:
        return f"LieSubalgebra(n={self.n}, dim={self.dim}, exact={self.exact})"


def lie_closure(generators: Sequence[np.ndarray], n: int | None = None,
                tol: float = DEFAULT_TOL) -> LieSubalgebra:
    """Smallest Lie subalgebra of so(n) containing the generators."""
    gens = [np.asarray(G) for G in generators]
    if n is None:
        if not gens:
            raise ValueError("dimension required for an empty generator list")
        n = gens[0].shape[0]
    exact = _is_exact_list(gens)
    gens = [_as_dtype(G, exact) for G in gens]
    span = la.Span(n * (n - 1) // 2, exact, tol)
    basis: list[np.ndarray] = []
    for G in gens:
        if span.add(skew_coords(G)):
            basis.append(G)
    frontier = list(basis)
    while frontier:
        new = []
        for A in frontier:
            for B in basis:
                C = commutator(A, B)
                if span.add(skew_coords(C)):
                    new.append(C)
        basis.extend(new)
        frontier = new
    return LieSubalgebra(n, basis, tol, check=False)


def stabilizer_algebra(forms: Sequence[Multivector], tol: float = DEFAULT_TOL) -> LieSubalgebra:
    """All skew A with ``derive(A, f) = 0`` for every f in forms."""
    if not forms:
        raise ValueError("need at least one form")
    n = forms[0].dim
    if any(f.dim != n for f in forms):
        raise ValueError("forms of different dimensions")
    exact = all(f.is_exact for f in forms)
    units = skew_basis(n, exact)
    # one sparse row per output monomial, collected column by column
    rows: dict[tuple, dict[int, object]] = {}
    for k, E in enumerate(units):
        for fi, f in enumerate(forms):
            for idx, c in derive(E, f).terms.items():
                rows.setdefault((fi,) + idx, {})[k] = c
    m = len(units)
    M = la.zeros((len(rows), m), exact)
    for r, key in enumerate(sorted(rows)):
        for k, c in rows[key].items():
            M[r, k] = c
    if len(rows) == 0:
        null = list(la.eye(m, exact))
    else:
        null = la.nullspace(M, tol)
    basis = [from_skew_coords(n, v) for v in null]
    return LieSubalgebra(n, basis, tol, check=False)


def _stack(alg: LieSubalgebra) -> np.ndarray:
    if not alg.basis:
        return la.zeros((0, alg.n), alg.exact)
    return np.concatenate(alg.basis, axis=0)


def annihilated_vectors(alg: LieSubalgebra) -> list[np.ndarray]:
    """Basis of the vectors killed by every element of the algebra."""
    if not alg.basis:
        return list(la.eye(alg.n, alg.exact))
    return la.nullspace(_stack(alg), alg.tol)


@dataclass
class Subspace:
    """Subspace of R^n given by its orthogonal projector."""

    projector: np.ndarray
    exact: bool = field(init=False)

    def __post_init__(self):
        self.exact = la.is_exact_array(self.projector)

    @property
    def n(self) -> int:
        return self.projector.shape[0]

    @property
    def dim(self) -> int:
        return int(round(float(sum(self.projector[i, i] for i in range(self.n)))))

    def support_index(self, tol: float = DEFAULT_TOL) -> int:
        """Smallest 1-based frame index not orthogonal to the subspace."""
        for i in range(self.n):
            if not la.is_zero(self.projector[i, i], tol):
                return i + 1
        return self.n + 1

    def sort_key(self) -> tuple[int, int]:
        return (self.dim, self.support_index())

    def basis(self, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
        """Orthonormal basis (exact when the norms allow, float otherwise)."""
        cols = [self.projector[:, i] for i in range(self.n)]
        return la.gram_schmidt(cols, tol=tol)

    def contains(self, v: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        v = np.asarray(v)
        return la.array_is_zero(self.projector @ v - v, tol)

    def is_invariant(self, alg: LieSubalgebra, tol: float = DEFAULT_TOL) -> bool:
        P = self.projector
        return all(la.array_is_zero(commutator(P, A), tol) for A in alg.basis)


def _line_projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v) / (v @ v)


def _sym_basis(n: int, exact: bool) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(i, n):
            E = la.zeros((n, n), exact)
            E[i, j] = 1
            E[j, i] = 1
            out.append(E)
    return out


def _generic_combination(vectors: list[np.ndarray], rng: np.random.Generator, exact: bool):
    coeffs = []
    for _ in vectors:
        num = int(rng.integers(1, 200)) * (1 if rng.random() < 0.5 else -1)
        den = int(rng.integers(1, 60))
        coeffs.append(Fraction(num, den) if exact else num / den)
    total = coeffs[0] * vectors[0]
    for c, v in zip(coeffs[1:], vectors[1:]):
        total = total + c * v
    return total


def _exactify_projector(Q: np.ndarray, alg_mats: list[np.ndarray]) -> np.ndarray:
    R = la.rationalize(Q)
    if (R @ R == R).all() and (R == R.T).all() and \
            all((commutator(R, A) == 0).all() for A in alg_mats):
        return R
    return Q


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    order = np.argsort(values)
    scale = max(1.0, float(np.max(np.abs(values))))
    clusters = [[int(order[0])]]
    for a, b in zip(order[:-1], order[1:]):
        gap = float(values[b] - values[a])
        if gap <= tol * scale:
            clusters[-1].append(int(b))
        elif gap < np.sqrt(tol) * scale:
            raise IndeterminateSplit(
                f"eigenvalue gap {gap:.3e} is neither clearly zero nor clearly nonzero")
        else:
            clusters.append([int(b)])
    return clusters


def _split_block(P: np.ndarray, mats: list[np.ndarray], rng: np.random.Generator,
                 tol: float, depth: int) -> list[np.ndarray]:
    n = P.shape[0]
    if depth > n:
        raise IndeterminateSplit("recursion depth exceeded while splitting")
    exact = la.is_exact_array(P) and _is_exact_list(mats)
    P = _as_dtype(P, exact)
    mats = [_as_dtype(A, exact) for A in mats]
    I = la.eye(n, exact)
    sym = _sym_basis(n, exact)
    null = _solve_commuting(mats, sym, extra=[I - P], tol=tol)
    if len(null) <= 1:
        return [P]
    elems = []
    for c in null:
        S = sym[0] * c[0]
        for k in range(1, len(sym)):
            if c[k] != 0:
                S = S + c[k] * sym[k]
        elems.append(S)
    S = _generic_combination(elems, rng, exact)
    Sf = la.float_array(S)
    Pf = la.float_array(P)
    shift = 1.0 + 2.0 * float(np.max(np.abs(np.linalg.eigvalsh(Sf)))) if Sf.any() else 1.0
    w, V = np.linalg.eigh(Sf + shift * Pf)
    keep = [i for i in range(n) if w[i] > shift / 2]
    clusters = _cluster(w[keep], tol)
    if len(clusters) < 2:
        raise IndeterminateSplit("generic commutant element has a single eigenvalue")
    out = []
    for cl in clusters:
        cols = V[:, [keep[i] for i in cl]]
        Q = cols @ cols.T
        if exact:
            Q = _exactify_projector(Q, mats)
        out.extend(_split_block(Q, mats, rng, tol, depth + 1))
    return out


def invariant_decomposition(alg: LieSubalgebra, rng: np.random.Generator | None = None,
                            ) -> list[Subspace]:
    """Orthogonal decomposition of R^n into real-irreducible invariant subspaces.

    The trivial summand is split into lines first.  The remainder is split by
    the eigenspaces of a seeded generic symmetric commuting matrix, recursing
    until each block has a one-dimensional symmetric commutant.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    n, tol, exact = alg.n, alg.tol, alg.exact
    # trivial part: orthogonal lines spanned by the annihilated vectors
    kernel = annihilated_vectors(alg)
    lines: list[np.ndarray] = []
    for v in kernel:
        w = v.copy()
        for u in lines:
            w = w - (u @ w) / (u @ u) * u
        if not la.array_is_zero(w, tol):
            lines.append(w)
    projectors = [_line_projector(v) for v in lines]
    rest = la.eye(n, exact)
    for Q in projectors:
        rest = rest - Q
    if not la.array_is_zero(rest, tol):
        projectors.extend(_split_block(rest, alg.basis, rng, tol, 0))
    blocks = [Subspace(Q) for Q in projectors]
    blocks.sort(key=Subspace.sort_key)
    return blocks


@dataclass
class SubspaceSplit:
    """The decomposition T = V + H attached to a holonomy algebra."""

    vertical: Subspace
    horizontal: Subspace
    vertical_blocks: list[Subspace]
    horizontal_blocks: list[Subspace]

    @property
    def dims(self) -> tuple[int, int]:
        return self.vertical.dim, self.horizontal.dim


def standard_split(alg: LieSubalgebra, rng: np.random.Generator | None = None) -> SubspaceSplit:
    """Put a block into H when some algebra element acts on it alone, nontrivially."""
    blocks = alg.blocks(rng)
    n, exact = alg.n, alg.exact
    vert, hor = [], []
    for B in blocks:
        if not alg.basis:
            vert.append(B)
            continue
        both_exact = exact and B.exact
        P = _as_dtype(B.projector, both_exact)
        comp = la.eye(n, both_exact) - P
        # c with (sum c_k A_k)(I - P) = 0; any nonzero solution acts on the block alone
        cols = [(_as_dtype(A, both_exact) @ comp).reshape(-1) for A in alg.basis]
        M = np.array(cols, dtype=object if both_exact else float).T
        (hor if la.nullspace(M, alg.tol) else vert).append(B)

    def total(bs: list[Subspace]) -> Subspace:
        P = la.zeros((n, n), all(b.exact for b in bs))
        for b in bs:
            P = P + b.projector
        return Subspace(P)

    return SubspaceSplit(total(vert), total(hor), vert, hor)


def fingerprint(alg: LieSubalgebra, rng: np.random.Generator | None = None) -> Fingerprint:
    blocks = tuple(sorted(b.dim for b in alg.blocks(rng)))
    return Fingerprint(alg.dim, alg.derived_dim(), alg.center_dim(), blocks)


def identify_algebra(alg: LieSubalgebra) -> str:
    """Name a holonomy candidate from its fingerprint; "other" if nothing matches."""
    if alg.dim == 0:
        return "other"
    fp = alg.fingerprint()
    blocks = fp.blocks
    if fp.dim == 14 and blocks == (7,) and fp.derived_dim == 14:
        return "g2"
    if fp.dim == 3 and fp.derived_dim == 3:
        if blocks == (7,):
            return "so3_irr"
        if blocks == (3, 4):
            return "su2_c"
    if fp.dim == 4 and fp.derived_dim == 3 and fp.center_dim == 1:
        if blocks == (3, 4):
            return "u1_plus_su2c"
        return "su2_plus_u1"
    if fp.dim == 6 and fp.derived_dim == 6 and blocks == (3, 4):
        return "su2_plus_su2c"
    if fp.dim == 8 and fp.derived_dim == 8 and blocks in ((6,), (1, 6)):
        return "su3"
    return "other"


def conjugate(alg: LieSubalgebra, Q: np.ndarray) -> LieSubalgebra:
    """The algebra Q alg Q^T for an orthogonal Q."""
    Qt = Q.T
    return LieSubalgebra(alg.n, [Q @ A @ Qt for A in alg.basis], alg.tol, check=False)
