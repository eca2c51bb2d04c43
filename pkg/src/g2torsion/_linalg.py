"""Exact/float linear algebra kernel.

Matrices are numpy arrays: ``dtype=object`` holding ``Fraction`` entries in
exact mode, ``float64`` in float mode.  Everything that is not spectral stays
exact whenever the inputs are exact.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def rational(x) -> Fraction:
    """Parse ints, Fractions and decimal/fraction strings ("-1", "1/2")."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


def is_exact_array(a: np.ndarray) -> bool:
    return a.dtype == object


def exact_array(rows) -> np.ndarray:
    arr = np.array(rows, dtype=object)
    flat = arr.reshape(-1)
    for i, v in enumerate(flat):
        flat[i] = rational(v)
    return flat.reshape(arr.shape)


def float_array(a) -> np.ndarray:
    return np.asarray(a, dtype=float)


def eye(n: int, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.eye(n)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = Fraction(int(i == j))
    return out


def zeros(shape, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.zeros(shape)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def is_zero(x, tol: float = DEFAULT_TOL) -> bool:
    if is_exact_scalar(x):
        return x == 0
    return abs(x) <= tol


def array_is_zero(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if is_exact_array(a):
        return all(v == 0 for v in a.reshape(-1))
    return bool(np.all(np.abs(a) <= tol))


def max_abs(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(max(abs(float(v)) for v in a.reshape(-1)))


def sqrt_exact(q) -> Fraction | None:
    """Square root of a non-negative rational when it is rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sqrt_any(q):
    """Exact square root when rational, float otherwise."""
    if is_exact_scalar(q):
        r = sqrt_exact(q)
        if r is not None:
            return r
    return math.sqrt(float(q))


class SparseEliminator:
    """Incremental exact row reduction on sparse rows (dicts col -> Fraction).

    Rows are added one at a time; each is reduced against the pivots already
    held and kept only when it is independent.  Used for nullspaces of large,
    very sparse systems such as stabilizer and commutant equations.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, dict[int, Fraction]] = {}

    def reduce(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        row = {k: v for k, v in row.items() if v != 0}
        while row:
            hits = [c for c in row if c in self.rows]
            if not hits:
                break
            c = min(hits)
            f = row[c]
            for k, v in self.rows[c].items():
                nv = row.get(k, 0) - f * v
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
        return row

    def add(self, row: dict[int, Fraction]) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        piv = min(row)
        inv = 1 / row[piv]
        row = {k: v * inv for k, v in row.items()}
        # keep the stored rows fully reduced with respect to the new pivot
        for c, r in self.rows.items():
            if piv in r:
                f = r[piv]
                for k, v in row.items():
                    nv = r.get(k, 0) - f * v
                    if nv == 0:
                        r.pop(k, None)
                    else:
                        r[k] = nv
        self.rows[piv] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)

    def nullspace(self) -> list[np.ndarray]:
        free = [c for c in range(self.ncols) if c not in self.rows]
        basis = []
        for f in free:
            v = zeros(self.ncols)
            v[f] = Fraction(1)
            for piv, r in self.rows.items():
                v[piv] = -r.get(f, Fraction(0))
            basis.append(v)
        return basis


def _rows_as_sparse(M: np.ndarray):
    for row in M:
        yield {j: Fraction(v) for j, v in enumerate(row) if v != 0}


def nullspace(M: np.ndarray, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Basis of {v : M v = 0}; exact RREF for object arrays, SVD otherwise."""
    M = np.asarray(M)
    ncols = M.shape[1]
    if is_exact_array(M):
        elim = SparseEliminator(ncols)
        for row in _rows_as_sparse(M):
            elim.add(row)
        return elim.nullspace()
    if M.shape[0] == 0:
        return list(np.eye(ncols))
    _, s, vt = np.linalg.svd(M)
    scale = max(1.0, s[0] if s.size else 1.0)
    r = int(np.sum(s > tol * scale))
    return [vt[i] for i in range(r, ncols)]


def rank(M: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if is_exact_array(M):
        elim = SparseEliminator(M.shape[1])
        for row in _rows_as_sparse(M):
            elim.add(row)
        return elim.rank
    s = np.linalg.svd(M, compute_uv=False)
    scale = max(1.0, s[0] if s.size else 1.0)
    return int(np.sum(s > tol * scale))


class Span:
    """Incrementally grown linear span supporting membership tests.

    Exact vectors use sparse elimination; float vectors keep an orthonormal
    basis and test the residual of the projection.
    """

    def __init__(self, dim: int, exact: bool, tol: float = DEFAULT_TOL):
        self.dim = dim
        self.exact = exact
        self.tol = tol
        self.vectors: list[np.ndarray] = []
        self._elim = SparseEliminator(dim) if exact else None
        self._onb: list[np.ndarray] = []

    def __len__(self):
        return len(self.vectors)

    def contains(self, v: np.ndarray) -> bool:
        if self.exact:
            return not self._elim.reduce({i: Fraction(x) for i, x in enumerate(v) if x != 0})
        r = np.asarray(v, dtype=float).copy()
        for q in self._onb:
            r -= (q @ r) * q
        return float(np.linalg.norm(r)) <= self.tol * max(1.0, float(np.linalg.norm(v)))

    def add(self, v: np.ndarray) -> bool:
        """Add v if independent; return whether it was added."""
        if self.exact:
            if self._elim.add({i: Fraction(x) for i, x in enumerate(v) if x != 0}):
                self.vectors.append(v)
                return True
            return False
        r = np.asarray(v, dtype=float).copy()
        for q in self._onb:
            r -= (q @ r) * q
        nrm = float(np.linalg.norm(r))
        if nrm <= self.tol * max(1.0, float(np.linalg.norm(v))):
            return False
        self._onb.append(r / nrm)
        self.vectors.append(np.asarray(v, dtype=float))
        return True


def gram_schmidt(vectors: Sequence[np.ndarray], metric: np.ndarray | None = None,
                 tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormalize; stays exact only if every norm is a rational square.

    Dependent vectors are dropped.  Falls back to float for the whole list as
    soon as an irrational normalization is needed.
    """
    vecs = [np.asarray(v) for v in vectors]
    exact = all(is_exact_array(v) for v in vecs) and (metric is None or is_exact_array(metric))

    def ip(a, b):
        return a @ b if metric is None else a @ (metric @ b)

    if exact:
        out: list[np.ndarray] = []
        for v in vecs:
            w = v.copy()
            for q in out:
                w = w - ip(q, w) * q
            n2 = ip(w, w)
            if n2 == 0:
                continue
            r = sqrt_exact(n2)
            if r is None:
                return gram_schmidt([float_array(v) for v in vecs],
                                    None if metric is None else float_array(metric), tol)
            out.append(w / r)
        return out
    vecs = [float_array(v) for v in vecs]
    G = None if metric is None else float_array(metric)
    out = []
    for v in vecs:
        w = v.copy()
        for q in out:
            w = w - (q @ w if G is None else q @ (G @ w)) * q
        n2 = w @ w if G is None else w @ (G @ w)
        if n2 <= tol * tol:
            continue
        out.append(w / math.sqrt(n2))
    return out


def rationalize(a: np.ndarray, max_den: int = 10**6) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    flat_in = np.asarray(a, dtype=float).reshape(-1)
    flat = out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat[i] = Fraction(float(v)).limit_denominator(max_den)
    return out


def det(M: np.ndarray):
    """Determinant, by exact elimination for object arrays."""
    M = np.asarray(M)
    if not is_exact_array(M):
        return float(np.linalg.det(M))
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        inv = 1 / A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] * inv
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return d


def inverse(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    if not is_exact_array(M):
        return np.linalg.inv(M)
    n = M.shape[0]
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise np.linalg.LinAlgError("singular matrix")
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return exact_array([row[n:] for row in A])


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SO(n) (float)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def cayley_rotation(n: int, rng: np.random.Generator, height: int = 3) -> np.ndarray:
    """Exact rational element of SO(n) via the Cayley transform of a random skew matrix."""
    S = zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(int(rng.integers(-height, height + 1)), int(rng.integers(1, height + 1)))
            S[i, j] = v
            S[j, i] = -v
    I = eye(n)
    return (I - S) @ inverse(I + S)


