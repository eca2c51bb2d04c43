"""Connections with skew torsion: pointwise algebra and homogeneous curvature.

Curvature convention: R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y], and
R(X, Y, Z, W) = g(R(X, Y) Z, W).  As an operator on 2-forms (orthonormal
frames), e_i ∧ e_j is sent to the 2-form of the endomorphism R(e_i, e_j), so
a round sphere of curvature K gives -K times the identity.

A connection with torsion tau is nabla^tau = nabla^g + tau_X, where
g(tau_X Y, Z) = tau(X, Y, Z).  Torsion coefficients are the values of tau on
the model frame, which need not be orthonormal.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .exterior import (Multivector, contract, derive,
                       frame_vector, inner, one_form, wedge)
from .linrep import LieSubalgebra, commutator, skew_coords
from .su3 import type_project

__all__ = [
    "torsion_split",
    "parallel_torsion_checks",
    "dform_parallel",
    "dform_oracle",
    "codifferential_parallel",
    "HomogeneousModel",
    "CurvatureTensor",
    "LeftInvariantCurvature",
    "leftinvariant_curvature",
    "nomizu_curvature",
    "holonomy_algebra",
    "submersion_curvature_check",
    "modified_torsion_flatness",
    "natural_action",
    "torsion_is_parallel",
    "orthonormal_frame",
]


# -- pointwise torsion algebra ------------------------------------------

def torsion_split(tau: Multivector, xi: np.ndarray, tol: float = DEFAULT_TOL
                  ) -> tuple[Multivector, Multivector]:
    """(gamma, sigma) with tau = xi ∧ gamma + sigma and both orthogonal to xi."""
    xi = np.asarray(xi)
    if not la.is_zero(xi @ xi - 1, tol):
        raise ValueError("xi must be a unit vector")
    gamma = contract(xi, tau)
    sigma = tau - wedge(one_form(xi), gamma)
    return gamma, sigma


def parallel_torsion_checks(tau: Multivector, xi: np.ndarray,
                            omega: Multivector | None = None,
                            tol: float = DEFAULT_TOL) -> dict:
    """Defects that must vanish when tau is parallel with parallel unit xi.

    Returns max-abs sizes of gamma_* tau, gamma_* sigma and, when a Kaehler
    form on xi^perp is given, of the part of gamma outside Lambda^(1,1).
    """
    gamma, sigma = torsion_split(tau, xi, tol)
    out = {
        "gamma_tau": derive(gamma, tau).max_abs(),
        "gamma_sigma": derive(gamma, sigma).max_abs(),
    }
    if omega is not None:
        out["gamma_11"] = (type_project(gamma, 2, 1, omega) - gamma).max_abs()
    out["ok"] = all(v <= tol for k, v in out.items())
    return out


def dform_parallel(tau: Multivector, beta: Multivector) -> Multivector:
    """d(beta) for a nabla^tau-parallel form: 2 sum_i (e_i _| tau) ∧ (e_i _| beta)."""
    n = tau.dim
    out = Multivector(n, beta.degree + 1)
    for i in range(1, n + 1):
        e = frame_vector(n, i)
        out = out + wedge(contract(e, tau), contract(e, beta))
    return 2 * out


def dform_oracle(tau: Multivector, beta: Multivector) -> Multivector:
    """Same quantity computed as -sum_i e_i ∧ (tau_{e_i})_* beta."""
    n = tau.dim
    out = Multivector(n, beta.degree + 1)
    for i in range(1, n + 1):
        e = frame_vector(n, i)
        out = out - wedge(Multivector.basis(n, (i,)), derive(contract(e, tau), beta))
    return out


def codifferential_parallel(tau: Multivector, beta: Multivector) -> Multivector:
    """delta(beta) for a nabla^tau-parallel form: sum_i e_i _| (tau_{e_i})_* beta."""
    n = tau.dim
    out = Multivector(n, beta.degree - 1)
    for i in range(1, n + 1):
        e = frame_vector(n, i)
        out = out + contract(e, derive(contract(e, tau), beta))
    return out


def natural_action(A: np.ndarray, beta: Multivector) -> Multivector:
    """Action of an arbitrary endomorphism on a form: (A.beta)(Y, ...) = -sum beta(.., A Y, ..)."""
    return derive(-np.asarray(A).T, beta)


# -- homogeneous models ---------------------------------------------------

def _positive_definite(G: np.ndarray, tol: float) -> bool:
    n = G.shape[0]
    for k in range(1, n + 1):
        d = la.det(G[:k, :k])
        if (d <= 0) if la.is_exact_scalar(d) else (d <= tol):
            return False
    return True


class HomogeneousModel:
    """Reductive Lie algebra data g = h + m with an invariant metric and torsion on m.

    ``brackets`` maps (i, j) with i < j (1-based, indices into the whole
    algebra) to a dict {k: c} meaning [e_i, e_j] = sum_k c e_k.  ``h`` lists
    the isotropy indices; the remaining indices, in order, form the frame of
    m on which ``metric`` and ``torsion`` are expressed.
    """

    def __init__(self, dim: int, brackets: dict, metric, torsion: Multivector | None = None,
                 h: Sequence[int] = (), names: Sequence[str] | None = None,
                 tol: float = DEFAULT_TOL, validate: bool = True):
        self.dim = dim
        self.tol = tol
        self.h = [int(i) for i in h]
        self.m = [i for i in range(1, dim + 1) if i not in self.h]
        metric = np.asarray(metric)
        self.exact = la.is_exact_array(metric) or metric.dtype.kind in "iu"
        if self.exact:
            metric = la.exact_array(metric)
        self.metric = metric
        c = la.zeros((dim, dim, dim), self.exact)
        for (i, j), terms in brackets.items():
            for k, v in terms.items():
                v = la.rational(v) if isinstance(v, (str, int)) else v
                c[i - 1, j - 1, k - 1] += v
                c[j - 1, i - 1, k - 1] -= v
        self.c = c
        md = len(self.m)
        self.torsion = torsion if torsion is not None else Multivector(md, 3)
        if self.torsion.dim != md:
            raise ValueError("torsion dimension does not match m")
        self.names = list(names) if names else [f"e{i}" for i in range(1, dim + 1)]
        self._ginv = None
        if validate:
            problems = self.violations()
            if problems:
                raise ValueError("invalid homogeneous model: " + "; ".join(problems))

    # -- structure ------------------------------------------------------
    @property
    def mdim(self) -> int:
        return len(self.m)

    @property
    def ginv(self) -> np.ndarray:
        if self._ginv is None:
            self._ginv = la.inverse(self.metric)
        return self._ginv

    def bracket(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Bracket of two vectors of the whole algebra (0-based component arrays)."""
        return np.einsum("i,j,ijk->k", u, v, self.c) if not self.exact else \
            np.array([sum(u[i] * v[j] * self.c[i, j, k]
                          for i in range(self.dim) if u[i] != 0
                          for j in range(self.dim) if v[j] != 0)
                      for k in range(self.dim)], dtype=object)

    def _unit(self, k: int) -> np.ndarray:
        v = la.zeros(self.dim, self.exact)
        v[k - 1] = 1
        return v

    def m_vector(self, a: int) -> np.ndarray:
        """Whole-algebra vector of the a-th m frame element (1-based)."""
        return self._unit(self.m[a - 1])

    def split(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(m-part in m coordinates, h-part in h coordinates)."""
        return (np.array([w[i - 1] for i in self.m], dtype=w.dtype),
                np.array([w[i - 1] for i in self.h], dtype=w.dtype))

    def ad_on_m(self, w: np.ndarray) -> np.ndarray:
        """Matrix of ad(w) restricted to m followed by projection to m."""
        M = la.zeros((self.mdim, self.mdim), self.exact)
        for b in range(1, self.mdim + 1):
            col, _ = self.split(self.bracket(w, self.m_vector(b)))
            M[:, b - 1] = col
        return M

    def violations(self) -> list[str]:
        out = []
        n, c = self.dim, self.c
        for i, j, k in itertools.combinations(range(n), 3):
            # Jacobi: [[ei,ej],ek] + cyclic = 0
            tot = c[i, j, :] @ c[:, k, :] + c[j, k, :] @ c[:, i, :] + c[k, i, :] @ c[:, j, :]
            if not la.array_is_zero(tot, self.tol):
                out.append(f"Jacobi fails on ({i + 1},{j + 1},{k + 1})")
                break
        G = self.metric
        if G.shape != (self.mdim, self.mdim):
            out.append("metric has the wrong size")
            return out
        if not la.array_is_zero(G - G.T, self.tol):
            out.append("metric is not symmetric")
        elif not _positive_definite(G, self.tol):
            out.append("metric is not positive definite")
        for hi in self.h:
            w = self._unit(hi)
            for b in self.m:
                _, hpart = self.split(self.bracket(w, self._unit(b)))
                if not la.array_is_zero(hpart, self.tol):
                    out.append("[h, m] is not contained in m")
                    return out
            A = self.ad_on_m(w)
            if not la.array_is_zero(A.T @ G + G @ A, self.tol):
                out.append("metric is not ad(h)-invariant")
            if not natural_action(A, self.torsion).is_zero(self.tol):
                out.append("torsion is not ad(h)-invariant")
        return out

    def with_torsion(self, tau: Multivector) -> "HomogeneousModel":
        new = object.__new__(HomogeneousModel)
        new.__dict__.update(self.__dict__)
        new.torsion = tau
        return new

    # -- connection maps ------------------------------------------------
    def levi_civita_map(self) -> list[np.ndarray]:
        """Nomizu map of the Levi-Civita connection, one m x m matrix per m frame vector."""
        md, G = self.mdim, self.metric
        brm = [[self.split(self.bracket(self.m_vector(a), self.m_vector(b)))[0]
                for b in range(1, md + 1)] for a in range(1, md + 1)]
        out = []
        for a in range(md):
            L = la.zeros((md, md), self.exact)
            for b in range(md):
                # g(U(X,Y), Z) = 1/2 (g([Z,X]_m, Y) + g(X, [Z,Y]_m))
                low = la.zeros(md, self.exact)
                for z in range(md):
                    low[z] = (G[b] @ brm[z][a] + G[a] @ brm[z][b]) / 2
                col = brm[a][b] / 2 + self.ginv @ low
                L[:, b] = col
            out.append(L)
        return out

    def torsion_map(self, tau: Multivector | None = None) -> list[np.ndarray]:
        """tau_X as m x m matrices: tau_X Y = g^{-1} tau(X, Y, .)."""
        tau = self.torsion if tau is None else tau
        md = self.mdim
        exact = self.exact and tau.is_exact
        out = []
        for a in range(1, md + 1):
            low = la.zeros((md, md), exact)
            for b in range(1, md + 1):
                for l in range(1, md + 1):
                    low[l - 1, b - 1] = tau.coef((a, b, l))
            out.append((self.ginv if exact else la.float_array(self.ginv)) @ low)
        return out

    def connection_map(self, kind: str = "tau", tau: Multivector | None = None):
        L = self.levi_civita_map()
        if kind == "g":
            return L
        if kind != "tau":
            raise ValueError(f"unknown connection {kind!r}")
        T = self.torsion_map(tau)
        return [a + b for a, b in zip(L, T)]

    def curvature(self, kind: str = "tau", tau: Multivector | None = None) -> "CurvatureTensor":
        return nomizu_curvature(self, self.connection_map(kind, tau))

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        sc = []
        for i, j in itertools.combinations(range(self.dim), 2):
            for k in range(self.dim):
                v = self.c[i, j, k]
                if v != 0:
                    sc.append([i + 1, j + 1, k + 1, _scalar_out(v)])
        out = {
            "dim": self.dim,
            "structure_constants": sc,
            "metric": [[_scalar_out(x) for x in row] for row in self.metric],
            "torsion": self.torsion.to_dict(),
        }
        if self.h:
            out["reductive_split"] = {"h": list(self.h), "m": list(self.m)}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict, tol: float = DEFAULT_TOL) -> "HomogeneousModel":
        try:
            sc = data["structure_constants"]
            metric = data["metric"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"model is missing {exc}") from exc
        split = data.get("reductive_split") or {}
        h = [int(i) for i in split.get("h", [])]
        dim = int(data.get("dim", 0)) or max(
            [max(int(t[0]), int(t[1]), int(t[2])) for t in sc] + h + [len(metric) + len(h)])
        brackets: dict = {}
        for t in sc:
            i, j, k, v = int(t[0]), int(t[1]), int(t[2]), _scalar_in(t[3])
            if i > j:
                i, j, v = j, i, -v
            brackets.setdefault((i, j), {})
            brackets[(i, j)][k] = brackets[(i, j)].get(k, 0) + v
        G = [[_scalar_in(x) for x in row] for row in metric]
        exact = all(la.is_exact_scalar(x) for row in G for x in row)
        G = la.exact_array(G) if exact else la.float_array(G)
        tau = Multivector.from_dict(data["torsion"]) if data.get("torsion") else None
        return cls(dim, brackets, G, tau, h, tol=tol)

    @classmethod
    def from_json(cls, text: str, tol: float = DEFAULT_TOL) -> "HomogeneousModel":
        return cls.from_dict(json.loads(text), tol)


def _scalar_out(v):
    return str(Fraction(v)) if la.is_exact_scalar(v) else float(v)


def _scalar_in(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


@dataclass
class CurvatureTensor:
    """R(e_a, e_b) as m x m matrices in the model frame, with the metric."""

    ops: dict
    metric: np.ndarray
    tol: float = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    def op(self, a: int, b: int) -> np.ndarray:
        """R(e_a, e_b), 1-based."""
        if a == b:
            return la.zeros((self.dim, self.dim), la.is_exact_array(self.metric))
        if a < b:
            return self.ops[(a, b)]
        return -self.ops[(b, a)]

    def apply(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        out = None
        for a in range(1, self.dim + 1):
            for b in range(a + 1, self.dim + 1):
                w = X[a - 1] * Y[b - 1] - X[b - 1] * Y[a - 1]
                if w != 0:
                    out = w * self.ops[(a, b)] if out is None else out + w * self.ops[(a, b)]
        if out is None:
            return la.zeros((self.dim, self.dim), la.is_exact_array(self.metric))
        return out

    def component(self, a: int, b: int, c: int, d: int):
        """g(R(e_a, e_b) e_c, e_d)."""
        return (self.metric @ (self.op(a, b)[:, c - 1]))[d - 1]

    def lowered(self, a: int, b: int) -> np.ndarray:
        """Matrix with entries g(R(e_a,e_b) e_c, e_d) at [c, d]."""
        return (self.metric @ self.op(a, b)).T

    def is_zero(self) -> bool:
        return all(la.array_is_zero(M, self.tol) for M in self.ops.values())

    def max_abs(self) -> float:
        return max((la.max_abs(M) for M in self.ops.values()), default=0.0)

    def pair_symmetric(self) -> bool:
        n = self.dim
        low = {(a, b): self.lowered(a, b) for a in range(1, n + 1) for b in range(1, n + 1)}
        for a, b, c, d in itertools.product(range(1, n + 1), repeat=4):
            if not la.is_zero(low[(a, b)][c - 1, d - 1] - low[(c, d)][a - 1, b - 1], self.tol):
                return False
        return True

    def metric_compatible(self) -> bool:
        """Each R(e_a, e_b) is g-skew."""
        return all(la.array_is_zero(self.metric @ M + (self.metric @ M).T, self.tol)
                   for M in self.ops.values())

    def bianchi_defect(self, a: int, b: int, c: int) -> np.ndarray:
        """Cyclic sum R(a,b)c + R(b,c)a + R(c,a)b."""
        return (self.op(a, b)[:, c - 1] + self.op(b, c)[:, a - 1] + self.op(c, a)[:, b - 1])

    def ricci(self) -> np.ndarray:
        """Ric(Y, Z) = tr(X -> R(X, Y) Z) in the model frame."""
        n = self.dim
        exact = la.is_exact_array(self.metric) and all(la.is_exact_array(M)
                                                        for M in self.ops.values())
        Ric = la.zeros((n, n), exact)
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                Ric[j - 1, k - 1] = sum((self.op(i, j)[i - 1, k - 1] for i in range(1, n + 1)),
                                        Fraction(0))
        return Ric

    def scalar(self):
        Ric = self.ricci()
        ginv = la.inverse(self.metric) if la.is_exact_array(Ric) else np.linalg.inv(
            la.float_array(self.metric))
        return sum((ginv[j, k] * Ric[k, j] for j in range(self.dim) for k in range(self.dim)),
                   Fraction(0))

    def sectional(self, X: np.ndarray, Y: np.ndarray):
        G = self.metric
        num = (G @ (self.apply(X, Y) @ Y)) @ X
        den = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
        return num / den

    def operator(self, frame: Sequence[np.ndarray]) -> dict:
        """Curvature operator on 2-forms w.r.t. a g-orthonormal frame (columns in model coords).

        Returns a dict mapping (a, b) to the 2-form image of f_a ∧ f_b.
        """
        k = len(frame)
        out = {}
        for a, b in itertools.combinations(range(k), 2):
            A = self.apply(frame[a], frame[b])
            terms = {}
            for c, d in itertools.combinations(range(k), 2):
                v = (self.metric @ (A @ frame[c])) @ frame[d]
                if v != 0:
                    terms[(c + 1, d + 1)] = v
            out[(a + 1, b + 1)] = Multivector(k, 2, terms)
        return out

    def apply_to_form(self, beta: Multivector, frame: Sequence[np.ndarray]) -> Multivector:
        op = self.operator(frame)
        out = Multivector(len(frame), 2)
        for (a, b), c in beta.terms.items():
            out = out + c * op[(a, b)]
        return out


def nomizu_curvature(model: HomogeneousModel, maps: list[np.ndarray] | None = None
                     ) -> CurvatureTensor:
    """R(X,Y) = [L(X), L(Y)] - L([X,Y]_m) - ad([X,Y]_h)|_m for the Nomizu map L."""
    L = maps if maps is not None else model.levi_civita_map()
    md = model.mdim
    ops = {}
    for a in range(1, md + 1):
        for b in range(a + 1, md + 1):
            w = model.bracket(model.m_vector(a), model.m_vector(b))
            wm, wh = model.split(w)
            R = commutator(L[a - 1], L[b - 1])
            for k in range(md):
                if wm[k] != 0:
                    R = R - wm[k] * L[k]
            if any(x != 0 for x in wh):
                hvec = la.zeros(model.dim, model.exact)
                for idx, x in zip(model.h, wh):
                    hvec[idx - 1] = x
                R = R - model.ad_on_m(hvec)
            ops[(a, b)] = R
    return CurvatureTensor(ops, model.metric, model.tol)


@dataclass
class LeftInvariantCurvature:
    christoffel: list[np.ndarray]
    curvature_g: CurvatureTensor
    curvature_tau: CurvatureTensor
    ricci_g: np.ndarray
    ricci_tau: np.ndarray


def leftinvariant_curvature(model: HomogeneousModel) -> LeftInvariantCurvature:
    """Curvature of a left-invariant metric from the Koszul formula, written out in loops.

    Independent of the Nomizu-map code path; only valid without isotropy.
    """
    if model.h:
        raise ValueError("left-invariant formula needs a model without isotropy")
    n, c, G, Gi = model.dim, model.c, model.metric, model.ginv
    zero = Fraction(0) if model.exact else 0.0
    koszul = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for l in range(n):
                s = zero
                for m in range(n):
                    s += c[i, j, m] * G[m, l] - c[j, l, m] * G[m, i] + c[l, i, m] * G[m, j]
                koszul[i][j][l] = s / 2
    gammas = []
    for i in range(n):
        Gam = la.zeros((n, n), model.exact)
        for j in range(n):
            for k in range(n):
                Gam[k, j] = sum((Gi[k, l] * koszul[i][j][l] for l in range(n)), zero)
        gammas.append(Gam)
    tmaps = model.torsion_map()
    results = []
    for conn in (gammas, [a + b for a, b in zip(gammas, tmaps)]):
        ops = {}
        for i in range(n):
            for j in range(i + 1, n):
                R = conn[i] @ conn[j] - conn[j] @ conn[i]
                for m in range(n):
                    if c[i, j, m] != 0:
                        R = R - c[i, j, m] * conn[m]
                ops[(i + 1, j + 1)] = R
        results.append(CurvatureTensor(ops, G, model.tol))
    return LeftInvariantCurvature(gammas, results[0], results[1],
                                  results[0].ricci(), results[1].ricci())


def orthonormal_frame(model: HomogeneousModel) -> list[np.ndarray]:
    """g-orthonormal frame of m in model coordinates (exact when the norms allow)."""
    basis = [la.eye(model.mdim, model.exact)[:, i] for i in range(model.mdim)]
    return la.gram_schmidt(basis, model.metric, model.tol)


def holonomy_algebra(model: HomogeneousModel, kind: str = "tau") -> LieSubalgebra:
    """Holonomy algebra of an invariant connection, as skew matrices in an orthonormal frame.

    Span of the curvature values, closed under brackets with the Nomizu map.
    """
    L = model.connection_map(kind)
    curv = nomizu_curvature(model, L)
    frame = orthonormal_frame(model)
    E = np.array(frame).T
    exact = la.is_exact_array(E) and model.exact
    if not exact:
        E = la.float_array(E)
        L = [la.float_array(M) for M in L]
    Einv = la.inverse(E) if exact else np.linalg.inv(E)

    def to_on(M):
        return Einv @ (M if exact else la.float_array(M)) @ E

    md = model.mdim
    span = la.Span(md * (md - 1) // 2, exact, model.tol)
    basis = []
    for M in curv.ops.values():
        A = to_on(M)
        if span.add(skew_coords(A)):
            basis.append(A)
    Ls = [to_on(M) for M in L]
    frontier = list(basis)
    while frontier:
        new = []
        for A in frontier:
            for Lx in Ls:
                C = commutator(Lx, A)
                if span.add(skew_coords(C)):
                    new.append(C)
        basis.extend(new)
        frontier = new
    return LieSubalgebra(md, basis, model.tol, check=False)


def torsion_is_parallel(model: HomogeneousModel, tau: Multivector | None = None) -> bool:
    tau = model.torsion if tau is None else tau
    return all(natural_action(M, tau).is_zero(model.tol)
               for M in model.connection_map("tau", tau))


# -- submersion and modified torsion --------------------------------------

def submersion_curvature_check(total: HomogeneousModel, base: HomogeneousModel,
                               xi_index: int, horizontal: Sequence[int], alpha,
                               omega_base: Multivector) -> dict:
    """Compare R^tau(pi^* beta) with pi^*(R^sigma(beta)) + 4 alpha^2 <beta, omega> pi^* omega.

    Both models must have orthonormal frames on m.  ``horizontal[k]`` is the
    total-space frame index (1-based) lifting the k-th base frame vector.
    """
    for mdl in (total, base):
        if not la.array_is_zero(mdl.metric - la.eye(mdl.mdim, mdl.exact), mdl.tol):
            raise ValueError("submersion check needs orthonormal model frames")
    n, k = total.mdim, base.mdim
    if len(horizontal) != k or xi_index in horizontal:
        raise ValueError("fibration data inconsistent: bad horizontal index map")
    lift = [frame_vector(n, h) for h in horizontal]
    xi = frame_vector(n, xi_index)

    def pull(beta: Multivector) -> Multivector:
        out = Multivector(n, beta.degree)
        for idx, c in beta.terms.items():
            out = out + Multivector.basis(n, tuple(horizontal[i - 1] for i in idx), c)
        return out

    gamma, sigma = torsion_split(total.torsion, xi, total.tol)
    report = {
        "gamma_matches": (gamma - alpha * pull(omega_base)).is_zero(total.tol),
        "sigma_basic": (sigma - pull(base.torsion)).is_zero(total.tol),
    }
    Rt = total.curvature("tau")
    Rb = base.curvature("tau")
    tframe = [frame_vector(n, i) for i in range(1, n + 1)]
    bframe = [frame_vector(k, i) for i in range(1, k + 1)]
    worst = 0.0
    for a, b in itertools.combinations(range(1, k + 1), 2):
        beta = Multivector.basis(k, (a, b))
        lhs = Rt.apply_to_form(pull(beta), tframe)
        rhs = pull(Rb.apply_to_form(beta, bframe)) + \
            4 * alpha * alpha * inner(beta, omega_base) * pull(omega_base)
        worst = max(worst, (lhs - rhs).max_abs())
    report["defect"] = worst
    report["holds"] = worst <= total.tol
    return report


def modified_torsion_flatness(model: HomogeneousModel, x, y, vertical: Sequence[int] = (1, 2, 3),
                              lam=None) -> dict:
    """Check that tau + lam vol_V is flat on V, with lam = -2(x + 2y) by default.

    The vertical frame vectors must be g-orthonormal.  Also reports the
    sectional curvature of g on V and compares it with (x + 4y)^2, and the
    curvature of the shifted torsions lam +- 1 as negative controls.
    """
    md = model.mdim
    V = list(vertical)
    if len(V) != 3:
        raise ValueError("block structure absent: need exactly three vertical indices")
    G = model.metric
    for i, a in enumerate(V):
        for b in V[i:]:
            want = 1 if a == b else 0
            if not la.is_zero(G[a - 1, b - 1] - want, model.tol):
                raise ValueError("block structure absent: vertical frame is not orthonormal")
    H = [a for a in range(1, md + 1) if a not in V]
    for a in V:
        for b in H:
            if not la.is_zero(G[a - 1, b - 1], model.tol):
                raise ValueError("block structure absent: V and H are not orthogonal")
    lam = -2 * (x + 2 * y) if lam is None else lam
    volV = Multivector.basis(md, tuple(sorted(V)))
    if tuple(sorted(V)) != tuple(V) and _perm_parity(V) < 0:
        volV = -volV

    def vertical_block_norm(shift) -> float:
        R = model.curvature("tau", model.torsion + shift * volV)
        worst = 0.0
        for a, b in itertools.combinations(range(1, md + 1), 2):
            low = R.lowered(a, b)
            for v in V:
                for w in V:
                    worst = max(worst, abs(float(low[v - 1, w - 1])))
        return worst, R

    flat_norm, R_flat = vertical_block_norm(lam)
    Rg = model.curvature("g")
    K = Rg.component(V[0], V[1], V[1], V[0])
    vertical_K = [Rg.component(a, b, b, a) for a, b in itertools.combinations(V, 2)]
    expected_K = (x + 4 * y) ** 2
    plus, _ = vertical_block_norm(lam + 1)
    minus, _ = vertical_block_norm(lam - 1)
    return {
        "lambda": lam,
        "flat_on_V": flat_norm <= model.tol,
        "flat_defect": flat_norm,
        "K": K,
        "K_expected": expected_K,
        "K_matches": all(la.is_zero(k - expected_K, model.tol) for k in vertical_K),
        "control_plus": plus,
        "control_minus": minus,
        "controls_nonflat": plus > model.tol and minus > model.tol,
    }


def _perm_parity(seq) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign
