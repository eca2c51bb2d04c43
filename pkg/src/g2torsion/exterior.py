"""Graded exterior algebra over a Euclidean space with an orthonormal frame.

Forms are stored as maps from strictly increasing index tuples (1-based) to
coefficients.  Coefficients are ``Fraction``/``int`` in exact mode and
``float`` in float mode.  Basis monomials are orthonormal, interior product
by a vector is the adjoint of exterior product by it, and the orientation is
the ascending frame order.

A 2-form ``b`` and a skew endomorphism ``A`` are identified through
``b(X, Y) = <A X, Y>``, so ``e^{12}`` maps ``e_1`` to ``e_2`` and ``e_2`` to
``-e_1``.
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL

__all__ = [
    "Multivector",
    "frame_vector",
    "wedge",
    "contract",
    "inner",
    "hodge",
    "derive",
    "degree_identities",
    "form_to_endo",
    "endo_to_form",
    "bracket",
    "one_form",
    "allclose",
    "volume",
    "restrict_form",
    "extend_form",
    "form_to_vector",
]

Index = tuple


def _perm_sign(seq: Iterable[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
            elif seq[i] == seq[j]:
                return 0
    return sign


def _merge_sign(a: Index, b: Index) -> int:
    """Sign of sorting the concatenation a+b (0 if they share an index)."""
    sign = 1
    for x in a:
        for y in b:
            if x == y:
                return 0
            if x > y:
                sign = -sign
    return sign


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    return c


class Multivector:
    """Homogeneous exterior form of fixed degree on R^dim."""

    __slots__ = ("dim", "degree", "terms")

    def __init__(self, dim: int, degree: int, terms: Mapping[Index, object] | None = None):
        if not 1 <= dim <= 10:
            raise ValueError(f"dimension {dim} out of range")
        out_of_range = not 0 <= degree <= dim
        clean = {}
        for idx, c in (terms or {}).items():
            if out_of_range and c != 0:
                raise ValueError(f"degree {degree} out of range for dim {dim}")
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} has wrong length for degree {degree}")
            if any(not 1 <= i <= dim for i in idx):
                raise ValueError(f"index {idx} out of range for dim {dim}")
            if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                sign = _perm_sign(idx)
                if sign == 0:
                    continue
                idx = tuple(sorted(idx))
                c = sign * c
            if c == 0:
                continue
            c = _clean(c)
            if idx in clean:
                c = clean[idx] + c
                if c == 0:
                    del clean[idx]
                    continue
            clean[idx] = c
        self.dim = dim
        self.degree = degree
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, dim: int, degree: int) -> "Multivector":
        return cls(dim, degree)

    @classmethod
    def scalar(cls, dim: int, value=1) -> "Multivector":
        return cls(dim, 0, {(): value})

    @classmethod
    def basis(cls, dim: int, idx: Iterable[int], coef=1) -> "Multivector":
        idx = tuple(idx)
        return cls(dim, len(idx), {idx: coef})

    @classmethod
    def from_string(cls, dim: int, text: str) -> "Multivector":
        """Parse sums like ``"e123 + e145 - 2 e246"`` (single-digit indices)."""
        text = text.replace(" ", "").replace("-", "+-")
        terms: dict = {}
        degree = None
        for chunk in filter(None, text.split("+")):
            coef_txt, _, idx_txt = chunk.partition("e")
            coef = Fraction(1) if coef_txt in ("", "+") else (
                Fraction(-1) if coef_txt == "-" else Fraction(coef_txt.rstrip("*")))
            idx = tuple(int(ch) for ch in idx_txt)
            degree = len(idx) if degree is None else degree
            if len(idx) != degree:
                raise ValueError("mixed degrees in form string")
            m = cls(dim, degree, {idx: coef})
            for k, v in m.terms.items():
                terms[k] = terms.get(k, 0) + v
        return cls(dim, degree or 0, terms)

    # -- basic protocol -----------------------------------------------
    def __iter__(self) -> Iterator[tuple[Index, object]]:
        return iter(sorted(self.terms.items()))

    def coef(self, idx: Iterable[int]):
        idx = tuple(idx)
        sign = _perm_sign(idx)
        if sign == 0:
            return Fraction(0)
        return sign * self.terms.get(tuple(sorted(idx)), Fraction(0))

    @property
    def is_exact(self) -> bool:
        return all(la.is_exact_scalar(c) for c in self.terms.values())

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return all(la.is_zero(c, tol) for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def to_float(self) -> "Multivector":
        return Multivector(self.dim, self.degree, {k: float(v) for k, v in self.terms.items()})

    def _check(self, other: "Multivector"):
        if not isinstance(other, Multivector):
            raise TypeError("expected a Multivector")
        if other.dim != self.dim or other.degree != self.degree:
            raise ValueError(
                f"shape mismatch: (dim {self.dim}, deg {self.degree}) vs "
                f"(dim {other.dim}, deg {other.degree})")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return Multivector(self.dim, self.degree, terms)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dim, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __mul__(self, c) -> "Multivector":
        if isinstance(c, Multivector):
            return wedge(self, c)
        return Multivector(self.dim, self.degree, {k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Multivector":
        if la.is_exact_scalar(c):
            c = Fraction(c)
        return self * (1 / c)

    def __xor__(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return (self.dim, self.degree, self.terms) == (other.dim, other.degree, other.terms)

    def __hash__(self):
        return hash((self.dim, self.degree, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        if not self.terms:
            return f"Multivector(dim={self.dim}, 0)"
        parts = []
        for idx, c in self:
            name = "e" + ("" if not idx else "".join(str(i) for i in idx) if self.dim < 10
                          else "_".join(str(i) for i in idx))
            parts.append(f"{c}*{name}" if idx else f"{c}")
        return f"Multivector(dim={self.dim}, " + " + ".join(parts) + ")"

    # -- evaluation and frame changes ---------------------------------
    def evaluate(self, *vectors) -> object:
        """Value of the form on ``degree`` vectors (as component arrays)."""
        if len(vectors) != self.degree:
            raise ValueError("wrong number of arguments")
        if self.degree == 0:
            return self.terms.get((), Fraction(0))
        V = np.array([np.asarray(v) for v in vectors], dtype=object).T  # dim x p
        total = Fraction(0)
        for idx, c in self.terms.items():
            total = total + c * _det([[V[i - 1, k] for k in range(self.degree)] for i in idx])
        return total

    def pullback(self, F: np.ndarray) -> "Multivector":
        """Components in the frame given by the columns of F.

        The result has coefficient ``a(F e_{j1}, ..., F e_{jp})`` at ``(j1..jp)``.
        For an orthogonal F this re-expresses the form in the new frame.
        """
        F = np.asarray(F)
        n = self.dim
        if F.shape != (n, n):
            raise ValueError("frame matrix has wrong shape")
        p = self.degree
        if p == 0:
            return Multivector(n, 0, dict(self.terms))
        out: dict = {}
        cols_all = list(itertools.combinations(range(1, n + 1), p))
        for idx, c in self.terms.items():
            rows = [F[i - 1] for i in idx]
            for cols in cols_all:
                d = _det([[r[j - 1] for j in cols] for r in rows])
                if d != 0:
                    out[cols] = out.get(cols, 0) + c * d
        return Multivector(n, p, out)

    def pushforward(self, Q: np.ndarray) -> "Multivector":
        """Image of the form under an orthogonal map Q (i.e. pullback by Q^T)."""
        return self.pullback(np.asarray(Q).T)

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        terms = []
        for idx, c in self:
            coef = str(Fraction(c)) if la.is_exact_scalar(c) else float(c)
            terms.append({"idx": list(idx), "coef": coef})
        return {"dim": self.dim, "degree": self.degree, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Multivector":
        try:
            dim = int(data["dim"])
            degree = int(data["degree"])
            raw = data.get("terms", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed multivector: {exc}") from exc
        terms = {}
        for k, t in enumerate(raw):
            try:
                idx = tuple(int(i) for i in t["idx"])
                c = t["coef"]
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"malformed term #{k}: {t!r}") from exc
            if isinstance(c, str):
                c = Fraction(c)
            elif isinstance(c, bool) or not isinstance(c, (int, float)):
                raise ValueError(f"bad coefficient in term #{k}: {c!r}")
            elif isinstance(c, int):
                c = Fraction(c)
            terms[idx] = terms.get(idx, 0) + c
        return cls(dim, degree, terms)

    @classmethod
    def from_json(cls, text: str) -> "Multivector":
        return cls.from_dict(json.loads(text))


_PERMS: dict[int, list[tuple[tuple[int, ...], int]]] = {}


def _det(M):
    p = len(M)
    if p == 0:
        return Fraction(1)
    if p == 1:
        return M[0][0]
    if p == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if p <= 4:
        if p not in _PERMS:
            _PERMS[p] = [(s, _perm_sign(s)) for s in itertools.permutations(range(p))]
        total = 0
        for perm, sign in _PERMS[p]:
            term = sign
            for r in range(p):
                term = term * M[r][perm[r]]
                if term == 0:
                    break
            total = total + term
        return total
    arr = np.array(M, dtype=object)
    if all(la.is_exact_scalar(x) for x in arr.reshape(-1)):
        return la.det(arr)
    return float(np.linalg.det(np.array(M, dtype=float)))


def volume(dim: int) -> Multivector:
    return Multivector.basis(dim, range(1, dim + 1))


def frame_vector(dim: int, i: int, coef=1) -> np.ndarray:
    """The frame vector ``coef * e_i`` (1-based) as an exact component array."""
    exact = la.is_exact_scalar(coef)
    v = la.zeros(dim, exact)
    v[i - 1] = Fraction(coef) if exact else coef
    return v


def one_form(v) -> Multivector:
    """Metric dual 1-form of a component vector."""
    v = np.asarray(v)
    return Multivector(len(v), 1, {(i + 1,): v[i] for i in range(len(v))})


def form_to_vector(a: Multivector) -> np.ndarray:
    if a.degree != 1:
        raise ValueError("expected a 1-form")
    exact = a.is_exact
    v = la.zeros(a.dim, exact)
    for (i,), c in a.terms.items():
        v[i - 1] = c
    return v


def wedge(a: Multivector, b: Multivector) -> Multivector:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    deg = a.degree + b.degree
    if deg > a.dim:
        return Multivector(a.dim, deg)
    out: dict = {}
    for I, x in a.terms.items():
        for J, y in b.terms.items():
            s = _merge_sign(I, J)
            if s:
                K = tuple(sorted(I + J))
                out[K] = out.get(K, 0) + s * x * y
    return Multivector(a.dim, deg, out)


def contract(v, a: Multivector) -> Multivector:
    """Interior product ``v ⌟ a`` for a component vector v."""
    v = np.asarray(v)
    if len(v) != a.dim:
        raise ValueError(f"dimension mismatch: {len(v)} vs {a.dim}")
    if a.degree == 0:
        return Multivector(a.dim, -1)
    out: dict = {}
    for I, c in a.terms.items():
        for pos, i in enumerate(I):
            vi = v[i - 1]
            if vi == 0:
                continue
            K = I[:pos] + I[pos + 1:]
            val = c * vi
            out[K] = out.get(K, 0) + (val if pos % 2 == 0 else -val)
    return Multivector(a.dim, a.degree - 1, out)


def inner(a: Multivector, b: Multivector):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    small, big = (a, b) if len(a.terms) <= len(b.terms) else (b, a)
    total = Fraction(0)
    for k, v in small.terms.items():
        w = big.terms.get(k)
        if w is not None:
            total = total + v * w
    return total


def hodge(a: Multivector) -> Multivector:
    n = a.dim
    full = tuple(range(1, n + 1))
    out = {}
    for I, c in a.terms.items():
        Ic = tuple(i for i in full if i not in I)
        out[Ic] = _merge_sign(I, Ic) * c
    return Multivector(n, n - a.degree, out)


def form_to_endo(b: Multivector) -> np.ndarray:
    """Skew matrix A with ``b(X, Y) = <A X, Y>``; A[j, i] = b(e_i, e_j)."""
    if b.degree != 2:
        raise ValueError("expected a 2-form")
    A = la.zeros((b.dim, b.dim), b.is_exact)
    for (i, j), c in b.terms.items():
        A[j - 1, i - 1] = c
        A[i - 1, j - 1] = -c
    return A


def endo_to_form(A: np.ndarray, tol: float = DEFAULT_TOL) -> Multivector:
    A = np.asarray(A)
    n = A.shape[0]
    if not la.array_is_zero(A + A.T, tol):
        raise ValueError("endomorphism is not skew-symmetric")
    return Multivector(n, 2, {(i + 1, j + 1): A[j, i] for i in range(n) for j in range(i + 1, n)})


def _as_endo(A) -> np.ndarray:
    return form_to_endo(A) if isinstance(A, Multivector) else np.asarray(A)


def derive(A, a: Multivector) -> Multivector:
    """Derivation extension ``A_* = sum_i A(e_i) ∧ e_i ⌟`` applied to a.

    A may be a skew matrix or a 2-form (converted by the standard
    identification).  On a monomial, each index is replaced in turn by every
    target index with weight ``A[j, i]``.
    """
    A = _as_endo(A)
    n = a.dim
    if A.shape != (n, n):
        raise ValueError(f"dimension mismatch: {A.shape} vs {n}")
    out: dict = {}
    cols = [[(j + 1, A[j, i]) for j in range(n) if A[j, i] != 0] for i in range(n)]
    for I, c in a.terms.items():
        for pos, i in enumerate(I):
            for j, w in cols[i - 1]:
                if j in I:
                    continue
                K = I[:pos] + (j,) + I[pos + 1:]
                s = _perm_sign(K)
                Ks = tuple(sorted(K))
                out[Ks] = out.get(Ks, 0) + s * w * c
    return Multivector(n, a.degree, out)


def bracket(a: Multivector, b: Multivector) -> Multivector:
    """Commutator of two 2-forms viewed as skew endomorphisms."""
    A, B = form_to_endo(a), form_to_endo(b)
    return endo_to_form(A @ B - B @ A)


def degree_identities(a: Multivector) -> tuple[Multivector, Multivector]:
    """Return ``(sum e_i ∧ (e_i ⌟ a), sum e_i ⌟ (e_i ∧ a))``."""
    n = a.dim
    first = Multivector(n, a.degree)
    second = Multivector(n, a.degree)
    for i in range(1, n + 1):
        e = frame_vector(n, i)
        ei = Multivector.basis(n, (i,))
        if a.degree > 0:
            first = first + wedge(ei, contract(e, a))
        if a.degree < n:
            second = second + contract(e, wedge(ei, a))
    return first, second


def allclose(a: Multivector, b: Multivector, tol: float = DEFAULT_TOL) -> bool:
    return (a - b).is_zero(tol)


def restrict_form(a: Multivector, frame: Sequence[np.ndarray]) -> Multivector:
    """Components of a on the span of orthonormal ``frame`` vectors, as a form on R^k."""
    k = len(frame)
    if a.degree > k:
        return Multivector(k, a.degree)
    F = np.array([np.asarray(v) for v in frame], dtype=object).T  # n x k
    out = {}
    for J in itertools.combinations(range(1, k + 1), a.degree):
        cols = [F[:, j - 1] for j in J]
        c = a.evaluate(*cols)
        if c != 0:
            out[J] = c
    return Multivector(k, a.degree, out)


def extend_form(b: Multivector, frame: Sequence[np.ndarray]) -> Multivector:
    """Inverse of :func:`restrict_form`: the form on R^n vanishing on the frame's complement."""
    if len(frame) != b.dim:
        raise ValueError("frame size does not match form dimension")
    n = len(frame[0])
    duals = [one_form(v) for v in frame]
    out = Multivector(n, b.degree)
    for J, c in b.terms.items():
        term = Multivector.scalar(n, c)
        for j in J:
            term = wedge(term, duals[j - 1])
        out = out + term
    return out
