"""SU(3)-structures on R^6: types, primitivity and normal forms."""
from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .exterior import (Multivector, contract, derive, form_to_endo, frame_vector, hodge,
                       inner, wedge)

__all__ = [
    "OMEGA_STD",
    "PSI_STD",
    "STAR_PSI_STD",
    "SU3Structure",
    "NormalizedFrame",
    "CubeRootFallback",
    "type_project",
    "lambda_contract",
    "primitive_11_basis",
    "su3_normalize",
    "lemma_gen_suite",
    "CheckReport",
]

OMEGA_STD = Multivector.from_string(6, "e12 + e34 + e56")
PSI_STD = Multivector.from_string(6, "e135 - e146 - e236 - e245")
STAR_PSI_STD = hodge(PSI_STD)


class CubeRootFallback(UserWarning):
    """Exact normalization needed an irrational rotation; float was used."""


@dataclass
class CheckReport:
    """Named boolean checks, in evaluation order."""

    checks: list[tuple[str, bool]] = field(default_factory=list)

    def add(self, name: str, ok: bool) -> None:
        self.checks.append((name, bool(ok)))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    @property
    def first_failure(self) -> str | None:
        return next((name for name, ok in self.checks if not ok), None)

    def __getitem__(self, name: str) -> bool:
        for k, ok in self.checks:
            if k == name:
                return ok
        raise KeyError(name)


@dataclass
class SU3Structure:
    omega: Multivector
    psi: Multivector

    @property
    def J(self) -> np.ndarray:
        return form_to_endo(self.omega)

    @property
    def dim(self) -> int:
        return self.omega.dim

    def violations(self, tol: float = DEFAULT_TOL) -> list[str]:
        out = []
        if self.omega.dim != 6 or self.psi.dim != 6:
            return ["SU(3) data must live on R^6"]
        if self.omega.degree != 2 or self.psi.degree != 3:
            return ["omega must be a 2-form and psi a 3-form"]
        J = self.J
        if not la.array_is_zero(J @ J + la.eye(6, la.is_exact_array(J)), tol):
            out.append("J^2 != -id")
        JJpsi = derive(J, derive(J, self.psi))
        if not (JJpsi + 9 * self.psi).is_zero(tol):
            out.append("psi is not of type (3,0)+(0,3)")
        if not la.is_zero(inner(self.psi, self.psi) - 4, tol):
            out.append(f"|psi|^2 = {inner(self.psi, self.psi)} != 4")
        return out

    def is_valid(self, tol: float = DEFAULT_TOL) -> bool:
        return not self.violations(tol)


def _type_eigenvalue(p: int, l: int) -> int:
    return -(p - 2 * l) ** 2


def type_project(a: Multivector, p: int, l: int, omega: Multivector = OMEGA_STD) -> Multivector:
    """Component of a in the (J_*)^2-eigenspace with eigenvalue -(p-2l)^2."""
    if a.degree != p:
        raise ValueError(f"form has degree {a.degree}, expected {p}")
    if not 0 <= l <= p // 2:
        raise ValueError(f"type index l={l} outside 0..{p // 2}")
    J = form_to_endo(omega)
    mu = _type_eigenvalue(p, l)
    out = a
    for other in range(p // 2 + 1):
        nu = _type_eigenvalue(p, other)
        if other == l or nu == mu:
            continue
        T = derive(J, derive(J, out))
        out = (T - nu * out) / Fraction(mu - nu)
    return out


def lambda_contract(a: Multivector, omega: Multivector = OMEGA_STD) -> Multivector:
    """Metric adjoint of ``omega ∧ .``."""
    n = a.dim
    if a.degree < 2:
        return Multivector(n, a.degree - 2)
    out = Multivector(n, a.degree - 2)
    for (i, j), w in omega.terms.items():
        out = out + w * contract(frame_vector(n, j), contract(frame_vector(n, i), a))
    return out


def primitive_11_basis(omega: Multivector = OMEGA_STD) -> list[Multivector]:
    """Basis of the primitive (1,1)-forms, i.e. the su(3) part of Lambda^2."""
    n = omega.dim
    norm2 = inner(omega, omega)
    span = la.Span(n * (n - 1) // 2, omega.is_exact)
    out = []
    for I in itertools.combinations(range(1, n + 1), 2):
        b = type_project(Multivector.basis(n, I), 2, 1, omega)
        b = b - (inner(b, omega) / norm2) * omega
        vec = np.array([b.coef(K) for K in itertools.combinations(range(1, n + 1), 2)],
                       dtype=object)
        if span.add(vec):
            out.append(b)
    return out


@dataclass
class NormalizedFrame:
    """Oriented orthonormal frame (columns) putting (omega, psi) in normal form."""

    frame: np.ndarray
    exact: bool
    x: object
    y: object
    theta: float
    fallback: bool = False


def _rational_cube_root(x: Fraction, y: Fraction) -> tuple[Fraction, Fraction] | None:
    """(c, s) rational with (c + i s)^3 = x - i y, the principal root, if it is rational."""
    z = cmath.exp(1j * cmath.phase(complex(float(x), -float(y))) / 3)
    c = Fraction(z.real).limit_denominator(10**6)
    s = Fraction(z.imag).limit_denominator(10**6)
    if c * c + s * s != 1:
        return None
    re = c**3 - 3 * c * s * s
    im = 3 * c * c * s - s**3
    if re == x and im == -y:
        return c, s
    return None


def _skew_normal_frame(J: np.ndarray, tol: float) -> list[np.ndarray]:
    """Orthonormal frame f1, J f1, f3, J f3, ... built from frame vectors in order."""
    n = J.shape[0]
    exact = la.is_exact_array(J)
    frame: list[np.ndarray] = []
    for k in range(n):
        if len(frame) == n:
            break
        v = la.eye(n, exact)[:, k]
        for f in frame:
            v = v - (f @ v) * f
        n2 = v @ v
        if la.is_zero(n2, tol):
            continue
        r = la.sqrt_any(n2) if exact else math.sqrt(n2)
        if exact and not la.is_exact_scalar(r):
            return _skew_normal_frame(la.float_array(J), tol)
        v = v / r
        frame.extend([v, J @ v])
    return frame


def su3_normalize(omega: Multivector, psi: Multivector, tol: float = DEFAULT_TOL,
                  exact: bool = True) -> NormalizedFrame:
    """Find an oriented orthonormal frame in which omega and psi are standard.

    The frame is f1, J f1, f3, J f3, ... completed from the coordinate
    vectors; then every complex line is rotated by the angle of the principal
    cube root of x - iy, where psi = x Re(Psi) + y Im(Psi) in that frame.
    The result is exact when all normalizations and the cube root are
    rational; otherwise a float frame is returned with ``fallback`` set.
    """
    s = SU3Structure(omega, psi)
    bad = s.violations(tol)
    if bad:
        raise ValueError("not an SU(3)-structure: " + "; ".join(bad))
    vol_coef = (wedge(omega, wedge(omega, omega)) / 6).coef(range(1, 7))
    if not la.is_zero(vol_coef - 1, tol):
        raise ValueError("omega^3/6 is not the positive volume form")
    J = s.J
    if not exact:
        J = la.float_array(J)
    frame = _skew_normal_frame(J, tol)
    F = np.array(frame).T
    is_exact = la.is_exact_array(F)
    p2 = psi.pullback(F) if is_exact else psi.to_float().pullback(F)
    x = inner(p2, PSI_STD) / 4
    y = inner(p2, STAR_PSI_STD) / 4
    if not (p2 - x * PSI_STD - y * STAR_PSI_STD).is_zero(tol):
        raise ValueError("psi is not a combination of the standard (3,0)+(0,3) forms")
    if not la.is_zero(x * x + y * y - 1, tol):
        raise ValueError("x^2 + y^2 != 1")
    theta = cmath.phase(complex(float(x), -float(y))) / 3
    root = _rational_cube_root(x, y) if is_exact else None
    if root is not None:
        c, sn = root
    else:
        if is_exact:
            warnings.warn("cube root is irrational; returning a float frame", CubeRootFallback)
        c, sn = math.cos(theta), math.sin(theta)
        F = la.float_array(F)
    G = F.copy()
    for j in range(3):
        a, b = F[:, 2 * j], F[:, 2 * j + 1]
        G[:, 2 * j] = c * a - sn * b
        G[:, 2 * j + 1] = sn * a + c * b
    out_exact = la.is_exact_array(G)
    return NormalizedFrame(G, out_exact, x, y, theta, exact and not out_exact)


def lemma_gen_suite(s: SU3Structure, tol: float = DEFAULT_TOL) -> CheckReport:
    """Check the basic algebraic identities of an SU(3)-structure on R^6."""
    rep = CheckReport()
    J = s.J
    psi, spsi = s.psi, hodge(s.psi)
    rep.add("J_* psi = 3 *psi", (derive(J, psi) - 3 * spsi).is_zero(tol))
    rep.add("J_* (*psi) = -3 psi", (derive(J, spsi) + 3 * psi).is_zero(tol))
    ok_a = ok_b = ok_type = True
    for i in range(1, 7):
        X = frame_vector(6, i)
        JX = J @ X
        ok_a &= (contract(JX, psi) + contract(X, spsi)).is_zero(tol)
        ok_b &= (contract(X, psi) - contract(JX, spsi)).is_zero(tol)
        Xpsi = contract(X, psi)
        ok_type &= (type_project(Xpsi, 2, 0, s.omega) - Xpsi).is_zero(tol)
    rep.add("JX _| psi = -X _| *psi", ok_a)
    rep.add("X _| psi = JX _| *psi", ok_b)
    rep.add("X _| psi has type (2,0)+(0,2)", ok_type)
    basis = primitive_11_basis(s.omega)
    rep.add("primitive (1,1) forms have dimension 8", len(basis) == 8)
    rep.add("alpha_* psi = alpha_* *psi = 0 for primitive (1,1) alpha",
            all(derive(a, psi).is_zero(tol) and derive(a, spsi).is_zero(tol) for a in basis))
    rep.add("|psi|^2 = 4", la.is_zero(inner(psi, psi) - 4, tol))
    return rep
