"""Pointwise and homogeneous models for every case of the G2 classification.

A PointModel is the algebraic shadow of a geometry at one point: the G2 form
in an adapted frame, the torsion, and generators of the holonomy algebra.
Case labels are "1", "2", "3a".."3e", "4a".."4c", "5a", "5b"; six-dimensional
SU(3) models use "su3-1".."su3-4".
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .exterior import (Multivector, bracket, contract, derive, extend_form, frame_vector,
                       hodge, inner, wedge)
from .g2 import BETA_STD, PHI_STD, PHI_X_CONSTANT, is_g2
from .linrep import annihilated_vectors, lie_closure, stabilizer_algebra
from .su3 import OMEGA_STD, PSI_STD, STAR_PSI_STD, SU3Structure
from .torsion import HomogeneousModel, codifferential_parallel, parallel_torsion_checks

__all__ = [
    "PointModel",
    "KaehlerPair",
    "KaehlerFamily",
    "CASE_LABELS",
    "SU3_LABELS",
    "build_product_cy",
    "build_product_nk",
    "build_alpha_sasaki7",
    "build_twistor_s1",
    "twistor_eta_checks",
    "solve_kaehler_pair",
    "build_ke_product",
    "build_space_form_hk",
    "build_r2_sasaki5",
    "build_3ad_sasaki",
    "build_nearly_parallel",
    "lemma_com_det_check",
    "to_dim6",
    "lift",
    "su3_model",
    "s3_model",
    "hopf_models",
    "sp2_model",
    "Sp2Data",
    "CASES",
    "GOLDEN_GRID",
    "build_case",
    "build_zoo",
    "verify_all",
    "parse_param",
]

CASE_LABELS = ("1", "2", "3a", "3b", "3c", "3d", "3e", "4a", "4b", "4c", "5a", "5b")
SU3_LABELS = ("su3-1", "su3-2", "su3-3", "su3-4")

E1 = Multivector.basis(7, (1,))
E2 = Multivector.basis(7, (2,))
VOL_V = Multivector.basis(7, (1, 2, 3))
# xi = e1 and its complement e2..e7 carry the standard SU(3) data
D_FRAME = [frame_vector(7, i) for i in range(2, 8)]
OMEGA7 = extend_form(OMEGA_STD, D_FRAME)
PSI7 = extend_form(PSI_STD, D_FRAME)
STAR_PSI7 = extend_form(STAR_PSI_STD, D_FRAME)
# splitting of xi^perp used by the four-dimensional horizontal cases
OMEGA_V0 = Multivector.basis(7, (2, 3))
OMEGA_H = Multivector.from_string(7, "e45 + e67")
H_FRAME = [frame_vector(7, i) for i in range(4, 8)]
BETA7 = tuple(extend_form(b, H_FRAME) for b in BETA_STD)


def parse_param(v):
    """Exact rational for ints, Fractions and strings like "1/2"; floats stay floats."""
    if isinstance(v, bool):
        raise TypeError("boolean is not a parameter value")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return float(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return Fraction(int(v))
    raise TypeError(f"unsupported parameter value {v!r}")


def _param_out(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_param_out(x) for x in v]
    return float(v)


def _param_float(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_param_float(x) for x in v]
    return v


def _param_in(v):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return v
    if isinstance(v, list):
        return [_param_in(x) for x in v]
    return v


def _is0(x, tol: float = DEFAULT_TOL) -> bool:
    return la.is_zero(x, tol)


def _matrix_out(A: np.ndarray) -> list:
    return [[str(x) if la.is_exact_scalar(x) else float(x) for x in row] for row in A]


def _matrix_in(rows) -> np.ndarray:
    exact = all(isinstance(x, (str, int)) for row in rows for x in row)
    if exact:
        return la.exact_array([[Fraction(x) for x in row] for row in rows])
    return np.array([[float(Fraction(x)) if isinstance(x, str) else float(x) for x in row]
                     for row in rows])


@dataclass
class PointModel:
    """Pointwise data of a geometry with parallel skew torsion.

    Seven-dimensional models carry ``phi``; six-dimensional ones carry the
    SU(3) pair ``omega``, ``psi`` instead and ``tau`` is the torsion sigma.
    """

    dim: int
    phi: Multivector | None
    tau: Multivector
    hol_generators: list[np.ndarray]
    params: dict
    case_label: str
    flags: dict = field(default_factory=dict)
    omega: Multivector | None = None
    psi: Multivector | None = None
    homogeneous: HomogeneousModel | None = None

    def hol_algebra(self, tol: float = DEFAULT_TOL):
        return lie_closure(self.hol_generators, self.dim, tol)

    def parallel_vectors(self, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
        """Orthonormal basis of the vectors killed by every holonomy generator."""
        vecs = annihilated_vectors(self.hol_algebra(tol))
        return la.gram_schmidt(vecs, tol=tol)

    def invariant_forms(self) -> list[Multivector]:
        if self.dim == 7:
            return [self.phi]
        return [self.omega, self.psi]

    def verify(self, tol: float = DEFAULT_TOL) -> dict:
        """Named checks: G2 (or SU(3)) form, holonomy inside the stabilizers, torsion algebra."""
        out: dict = {}
        if self.dim == 7:
            out["is_g2"] = is_g2(self.phi, tol).is_g2
        else:
            out["is_su3"] = SU3Structure(self.omega, self.psi).is_valid(tol)
        out["hol_preserves_structure"] = all(
            derive(A, f).is_zero(tol) for A in self.hol_generators for f in self.invariant_forms())
        out["hol_preserves_tau"] = all(derive(A, self.tau).is_zero(tol)
                                       for A in self.hol_generators)
        worst = 0.0
        for xi in self.parallel_vectors(tol):
            rep = parallel_torsion_checks(self.tau, xi, tol=tol)
            worst = max(worst, rep["gamma_tau"], rep["gamma_sigma"])
        out["parallel_torsion_defect"] = worst
        out["parallel_torsion"] = worst <= tol
        out["ok"] = all(v for k, v in out.items() if isinstance(v, bool))
        return out

    def transform(self, Q: np.ndarray) -> "PointModel":
        """The model in the frame moved by the orthogonal matrix Q."""
        Q = np.asarray(Q)
        exact = la.is_exact_array(Q)

        def push(f):
            if f is None:
                return None
            return (f if exact else f.to_float()).pushforward(Q)

        hol = []
        for A in self.hol_generators:
            A = A if exact else la.float_array(A)
            hol.append(Q @ A @ Q.T)
        return PointModel(self.dim, push(self.phi), push(self.tau), hol, dict(self.params),
                          self.case_label, dict(self.flags), push(self.omega), push(self.psi))

    def to_float(self) -> "PointModel":
        f = (lambda m: None if m is None else m.to_float())
        params = {k: _param_float(v) for k, v in self.params.items()}
        return PointModel(self.dim, f(self.phi), f(self.tau),
                          [la.float_array(A) for A in self.hol_generators], params,
                          self.case_label, dict(self.flags), f(self.omega), f(self.psi))

    def to_dict(self) -> dict:
        out = {"kind": "point_model", "dim": self.dim, "case_label": self.case_label}
        if self.dim == 7:
            out["phi"] = self.phi.to_dict()
        else:
            out["omega"] = self.omega.to_dict()
            out["psi"] = self.psi.to_dict()
        out["tau"] = self.tau.to_dict()
        out["hol_generators"] = [_matrix_out(A) for A in self.hol_generators]
        out["params"] = {k: _param_out(v) for k, v in sorted(self.params.items())}
        out["flags"] = {k: _param_out(v) for k, v in sorted(self.flags.items())}
        if self.homogeneous is not None:
            out["homogeneous"] = self.homogeneous.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PointModel":
        if data.get("kind") != "point_model":
            raise ValueError("not a point model: missing kind 'point_model'")
        dim = int(data["dim"])
        if dim not in (6, 7):
            raise ValueError(f"point models live in dimension 6 or 7, got {dim}")
        phi = Multivector.from_dict(data["phi"]) if dim == 7 else None
        omega = Multivector.from_dict(data["omega"]) if dim == 6 else None
        psi = Multivector.from_dict(data["psi"]) if dim == 6 else None
        tau = Multivector.from_dict(data["tau"])
        hol = [_matrix_in(A) for A in data.get("hol_generators", [])]
        for A in hol:
            if A.shape != (dim, dim):
                raise ValueError("holonomy generator has the wrong size")
        params = {k: _param_in(v) for k, v in data.get("params", {}).items()}
        flags = dict(data.get("flags", {}))
        hom = None
        if "homogeneous" in data:
            hom = HomogeneousModel.from_dict(data["homogeneous"])
        return cls(dim, phi, tau, hol, params, str(data.get("case_label", "")), flags,
                   omega, psi, hom)


# -- holonomy generators -----------------------------------------------------

@lru_cache(maxsize=None)
def _stab(key: str) -> tuple:
    forms = {
        "g2": [PHI_STD],
        "su3": [PHI_STD, E1],
        "u1_su2": [PHI_STD, E1, OMEGA_V0],
        "sp1": [PHI_STD, E1, E2],
        "su2_su2c": [PHI_STD, VOL_V],
    }[key]
    return tuple(stabilizer_algebra(forms).basis)


def _hol(key: str) -> list[np.ndarray]:
    return list(_stab(key))


def _sum_forms(forms, dim: int, degree: int) -> Multivector:
    out = Multivector(dim, degree)
    for f in forms:
        out = out + f
    return out


def _cocalibrated(tau: Multivector, phi: Multivector, tol: float = DEFAULT_TOL) -> bool:
    # phi is nabla^tau-parallel, so its codifferential is algebraic in tau
    return codifferential_parallel(tau, phi).is_zero(tol)


def _sigma_for(x, y) -> Multivector:
    """sigma with x sigma + y *sigma = psi_std, so phi stays standard."""
    r2 = x * x + y * y
    return (x * PSI7 - y * STAR_PSI7) / r2


# -- case 3: one parallel vector ------------------------------------------------

def build_product_cy(x=1, y=0) -> PointModel:
    """R x Calabi-Yau: tau = 0 and phi = e1 ∧ omega + x psi + y *psi."""
    x, y = parse_param(x), parse_param(y)
    if not _is0(x * x + y * y - 1):
        raise ValueError(f"need x^2 + y^2 = 1, got {x * x + y * y}")
    phi = wedge(E1, OMEGA7) + x * PSI7 + y * STAR_PSI7
    hol = stabilizer_algebra([phi, E1]).basis
    return PointModel(7, phi, Multivector(7, 3), list(hol), {"x": x, "y": y}, "3a",
                      {"torsion_free": True})


def build_product_nk(x=1, y=0, sigma_norm2=4) -> PointModel:
    """R x strict nearly Kaehler: tau = sigma, phi = e1 ∧ omega + x sigma + y *sigma."""
    x, y, s2 = parse_param(x), parse_param(y), parse_param(sigma_norm2)
    if _is0(s2) or s2 < 0:
        raise ValueError("sigma_norm2 must be positive")
    if not _is0((x * x + y * y) * s2 - 4):
        raise ValueError(f"need x^2 + y^2 = 4/|sigma|^2, got {x * x + y * y} and {4 / s2}")
    sigma = _sigma_for(x, y)
    phi = PHI_STD
    flags = {"cocalibrated": _cocalibrated(sigma, phi)}
    return PointModel(7, phi, sigma, _hol("su3"), {"x": x, "y": y, "sigma_norm2": s2}, "3b",
                      flags)


def build_alpha_sasaki7(alpha=1) -> PointModel:
    """alpha-Sasaki over a Kaehler-Einstein 6-manifold: tau = alpha e1 ∧ omega."""
    alpha = parse_param(alpha)
    if _is0(alpha):
        raise ValueError("alpha = 0 is the product case 3a; use build_product_cy")
    tau = alpha * wedge(E1, OMEGA7)
    return PointModel(7, PHI_STD, tau, _hol("su3"),
                      {"alpha": alpha, "scal_N": 72 * alpha * alpha}, "3c")


def twistor_eta_checks(eta: Multivector, sigma: Multivector,
                       tol: float = DEFAULT_TOL) -> dict:
    """eta must act trivially on omega, sigma and *sigma (these live on e2..e7)."""
    star = contract(frame_vector(7, 1), hodge(wedge(E1, sigma)))
    return {
        "eta_omega": derive(eta, OMEGA7).is_zero(tol),
        "eta_sigma": derive(eta, sigma).is_zero(tol) and derive(eta, star).is_zero(tol),
    }


def build_twistor_s1(x=1, y=0, sigma_norm2=4, eta: Multivector | None = None) -> PointModel:
    """Circle bundle over a nearly Kaehler twistor space: tau = e1 ∧ eta/2 + sigma."""
    x, y, s2 = parse_param(x), parse_param(y), parse_param(sigma_norm2)
    if _is0(s2) or s2 < 0:
        raise ValueError("sigma_norm2 must be positive")
    if not _is0((x * x + y * y) * s2 - 4):
        raise ValueError(f"need x^2 + y^2 = 4/|sigma|^2, got {x * x + y * y} and {4 / s2}")
    eta = OMEGA_H - 2 * OMEGA_V0 if eta is None else eta
    sigma = _sigma_for(x, y)
    checks = twistor_eta_checks(eta, sigma)
    if not all(checks.values()):
        bad = [k for k, v in checks.items() if not v]
        raise ValueError("eta does not act trivially: " + ", ".join(bad))
    gamma = eta / 2
    a = inner(gamma, OMEGA_V0)
    b = inner(gamma, OMEGA_H) / 2
    tau = wedge(E1, gamma) + sigma
    flags = dict(checks)
    flags["a_plus_2b_zero"] = _is0(a + 2 * b)
    flags["cocalibrated"] = _cocalibrated(tau, PHI_STD)
    return PointModel(7, PHI_STD, tau, _hol("u1_su2"),
                      {"x": x, "y": y, "sigma_norm2": s2, "a": a, "b": b}, "3d", flags)


@dataclass(frozen=True)
class KaehlerPair:
    a: object
    b: object


@dataclass(frozen=True)
class KaehlerFamily:
    """The flat solutions (a, b) = (t, -2t), t != 0."""

    def at(self, t) -> KaehlerPair:
        t = parse_param(t)
        if _is0(t):
            raise ValueError("the family parameter must be nonzero")
        return KaehlerPair(t, -2 * t)


def solve_kaehler_pair(scalK, scalSigma) -> KaehlerPair | KaehlerFamily:
    """Solve scal^K = 16a(2a+b), scal^Sigma = 8b(2a+b) with b != 0."""
    sK, sS = parse_param(scalK), parse_param(scalSigma)
    if _is0(sK) and _is0(sS):
        return KaehlerFamily()
    if not (sK + sS > 0 and not _is0(sS)):
        raise ValueError(f"inadmissible scalar curvatures ({sK}, {sS}): need "
                         "scalK + scalSigma > 0 with scalSigma != 0, or both zero")
    r = la.sqrt_exact(2 * (sK + sS)) if isinstance(sK + sS, Fraction) else None
    if r is None:
        r = math.sqrt(2 * float(sK + sS))
        sK, sS = float(sK), float(sS)
    return KaehlerPair(sK / (4 * r), sS / (2 * r))


def build_ke_product(a, b) -> PointModel:
    """Circle bundle over K^4 x Sigma^2: tau = e1 ∧ (a omega_K + b omega_Sigma)."""
    a, b = parse_param(a), parse_param(b)
    if _is0(b):
        raise ValueError("b = 0 splits off a flat factor; need b != 0")
    gamma = a * OMEGA_H + b * OMEGA_V0
    tau = wedge(E1, gamma)
    params = {"a": a, "b": b, "scal_K": 16 * a * (2 * a + b), "scal_Sigma": 8 * b * (2 * a + b)}
    return PointModel(7, PHI_STD, tau, _hol("u1_su2"), params, "3e",
                      {"flat_bases": _is0(2 * a + b)})


# -- case 4: three parallel vectors ----------------------------------------------

def s3_model(a=1) -> HomogeneousModel:
    """su(2) with [xi_i, xi_j] = -2a xi_k, unit metric and tau = a vol."""
    a = parse_param(a)
    br = {(1, 2): {3: -2 * a}, (2, 3): {1: -2 * a}, (1, 3): {2: 2 * a}}
    br = {k: {i: c for i, c in v.items() if c != 0} for k, v in br.items()}
    return HomogeneousModel(3, br, la.eye(3, True), a * Multivector.basis(3, (1, 2, 3)))


def build_space_form_hk(a=1) -> PointModel:
    """Space form of curvature a^2 times a hyperkaehler 4-manifold: tau = a vol_V."""
    a = parse_param(a)
    br = {(1, 2): {3: -2 * a}, (2, 3): {1: -2 * a}, (1, 3): {2: 2 * a}}
    br = {k: {i: c for i, c in v.items() if c != 0} for k, v in br.items()}
    tau = a * VOL_V
    hom = HomogeneousModel(7, br, la.eye(7, True), tau)
    m = PointModel(7, PHI_STD, tau, _hol("sp1"), {"a": a, "sectional": a * a}, "4a",
                   {"torsion_free": _is0(a)}, homogeneous=hom)
    return m


def build_r2_sasaki5(alpha=1) -> PointModel:
    """R^2 times a 5-dim alpha-Sasaki manifold: tau = alpha e1 ∧ Phi.

    Phi = beta_3, so that dropping the flat axis e3 leaves omega = e1 ∧ e2 + Phi.
    """
    alpha = parse_param(alpha)
    if _is0(alpha):
        raise ValueError("alpha must be nonzero")
    tau = alpha * wedge(E1, BETA7[2])
    return PointModel(7, PHI_STD, tau, _hol("sp1"),
                      {"alpha": alpha, "scal_K": 32 * alpha * alpha}, "4b")


def _so3(B) -> np.ndarray:
    if B is None:
        return la.eye(3, True)
    B = np.asarray(B)
    if B.dtype.kind in "iuO" or all(isinstance(x, str) for x in B.reshape(-1)):
        B = la.exact_array([[parse_param(x) for x in row] for row in B])
    exact = la.is_exact_array(B)
    I = la.eye(3, exact)
    if B.shape != (3, 3) or not la.array_is_zero(B.T @ B - I) or not _is0(la.det(B) - 1):
        raise ValueError("B must be a matrix in SO(3)")
    return B


def build_3ad_sasaki(alpha=1, delta=2, B=None) -> PointModel:
    """3-(alpha, delta)-Sasaki data: tau = (delta - 4 alpha) vol_V + alpha sum xi_i ∧ Phi_i.

    phi = vol_V + sum xi_i ∧ beta_i is standard and Phi_j = sum_i B_ij beta_i.
    Mixing by B != id is only parallel when delta = 2 alpha.
    """
    alpha, delta = parse_param(alpha), parse_param(delta)
    if _is0(alpha):
        raise ValueError("alpha must be nonzero")
    B = _so3(B)
    parallel = _is0(delta - 2 * alpha)
    identity = la.array_is_zero(B - la.eye(3, la.is_exact_array(B)))
    if not parallel and not identity:
        raise ValueError("mixing matrix B != id requires delta = 2 alpha")
    Phi = [_sum_forms([B[i, j] * BETA7[i] for i in range(3)], 7, 2) for j in range(3)]
    x, y = delta - 4 * alpha, alpha
    tau = x * VOL_V + y * _sum_forms([wedge(Multivector.basis(7, (i + 1,)), Phi[i])
                                      for i in range(3)], 7, 3)
    params = {"alpha": alpha, "delta": delta, "x": x, "y": y, "lambda": -2 * (x + 2 * y),
              "K": delta * delta, "B": [[B[i, j] for j in range(3)] for i in range(3)]}
    flags = {
        "cocalibrated": _cocalibrated(tau, PHI_STD),
        "B_symmetric": la.array_is_zero(B - B.T),
        "nearly_parallel": _is0(delta - 5 * alpha) and identity,
    }
    hol = _hol("sp1") if parallel else _hol("su2_su2c")
    return PointModel(7, PHI_STD, tau, hol, params, "4c" if parallel else "5a", flags)


def build_nearly_parallel(lam=1) -> PointModel:
    """tau = lambda phi; torsion free when lambda = 0."""
    lam = parse_param(lam)
    tau = lam * PHI_STD
    # nabla^g_X phi = -(tau_X)_* phi = -lambda (phi_X)_* phi = -lambda c X _| *phi
    star = hodge(PHI_STD)
    ok = all((derive(contract(frame_vector(7, i), tau), PHI_STD)
              - lam * PHI_X_CONSTANT * contract(frame_vector(7, i), star)).is_zero()
             for i in range(1, 8))
    params = {"lambda": lam, "nabla_phi_constant": -lam * PHI_X_CONSTANT}
    flags = {"phi_x_identity": ok, "torsion_free": _is0(lam)}
    return PointModel(7, PHI_STD, tau, _hol("g2"), params, "2" if _is0(lam) else "5b", flags)


def lemma_com_det_check(gammas, a, tol: float = DEFAULT_TOL) -> dict:
    """Check [g_i, g_j] = a g_k and a |g_i|^2 = -4 det A for self-dual g_i on R^4."""
    gammas = list(gammas)
    if len(gammas) != 3 or any(g.dim != 4 or g.degree != 2 for g in gammas):
        raise ValueError("expected three 2-forms on R^4")
    if not all((hodge(g) - g).is_zero(tol) for g in gammas):
        raise ValueError("the forms must be self-dual")
    a = parse_param(a)
    A = np.array([[inner(g, b) / 2 for b in BETA_STD] for g in gammas], dtype=object)
    exact = all(g.is_exact for g in gammas) and isinstance(a, Fraction)
    if not exact:
        A = la.float_array(A)
    d = la.det(A)
    com = [bracket(gammas[i], gammas[j]) - a * gammas[k]
           for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1))]
    lhs = [a * inner(g, g) for g in gammas]
    rhs = -4 * d
    return {
        "A": A,
        "det": d,
        "com_defect": max(c.max_abs() for c in com),
        "com": all(c.is_zero(tol) for c in com),
        "det_lhs": lhs,
        "det_rhs": rhs,
        "det_identity": all(_is0(x - rhs, tol) for x in lhs),
    }


# -- dimension six ------------------------------------------------------------

def _drop(A: np.ndarray, k: int) -> np.ndarray:
    keep = [i for i in range(A.shape[0]) if i != k - 1]
    return A[np.ix_(keep, keep)]


def _insert(A: np.ndarray, k: int) -> np.ndarray:
    n = A.shape[0] + 1
    out = la.zeros((n, n), la.is_exact_array(A))
    keep = [i for i in range(n) if i != k - 1]
    out[np.ix_(keep, keep)] = A
    return out


def _restrict_coords(f: Multivector, k: int) -> Multivector:
    """Drop coordinate k from a form not involving e^k."""
    terms = {}
    for idx, c in f.terms.items():
        if k in idx:
            raise ValueError(f"form involves the dropped axis e{k}")
        terms[tuple(i - (i > k) for i in idx)] = c
    return Multivector(f.dim - 1, f.degree, terms)


def _insert_coords(f: Multivector, k: int) -> Multivector:
    terms = {tuple(i + (i >= k) for i in idx): c for idx, c in f.terms.items()}
    return Multivector(f.dim + 1, f.degree, terms)


_SU3_FROM_7 = {"2": "su3-2", "3a": "su3-2", "3b": "su3-3", "4b": "su3-4"}


def to_dim6(model: PointModel, axis: int = 1, tol: float = DEFAULT_TOL) -> PointModel:
    """Split off the coordinate axis e_axis of a product R x N.

    The axis must be parallel and orthogonal to the torsion.
    """
    if model.dim != 7:
        raise ValueError("to_dim6 expects a 7-dimensional model")
    xi = frame_vector(7, axis)
    if not contract(xi, model.tau).is_zero(tol):
        raise ValueError(f"e{axis} _| tau != 0: not a Riemannian product along this axis")
    if any(not la.array_is_zero(A @ xi, tol) for A in model.hol_generators):
        raise ValueError(f"e{axis} is not parallel")
    omega = _restrict_coords(contract(xi, model.phi), axis)
    psi = _restrict_coords(model.phi - wedge(Multivector.basis(7, (axis,)),
                                             contract(xi, model.phi)), axis)
    hol = [_drop(A, axis) for A in model.hol_generators]
    label = _SU3_FROM_7.get(model.case_label, "")
    params = dict(model.params)
    params["axis"] = Fraction(axis)
    return PointModel(6, None, _restrict_coords(model.tau, axis), hol, params, label,
                      dict(model.flags), omega, psi)


def lift(model6: PointModel, axis: int | None = None) -> PointModel:
    """The product R x N with the new axis at position ``axis``; phi = xi ∧ omega + psi."""
    if model6.dim != 6:
        raise ValueError("lift expects a 6-dimensional model")
    if axis is None:
        axis = int(model6.params.get("axis", 1))
    xi = Multivector.basis(7, (axis,))
    phi = wedge(xi, _insert_coords(model6.omega, axis)) + _insert_coords(model6.psi, axis)
    hol = [_insert(A, axis) for A in model6.hol_generators]
    params = {k: v for k, v in model6.params.items() if k != "axis"}
    return PointModel(7, phi, _insert_coords(model6.tau, axis), hol, params, "",
                      dict(model6.flags))


def su3_model(kind: str = "cy", **params) -> PointModel:
    """The constructible six-dimensional cases: "cy", "nk" or "sasaki"."""
    if kind == "cy":
        return to_dim6(build_product_cy(**params), 1)
    if kind == "nk":
        return to_dim6(build_product_nk(**params), 1)
    if kind == "sasaki":
        return to_dim6(build_r2_sasaki5(**params), 3)
    raise ValueError(f"unknown six-dimensional model {kind!r}")


# -- homogeneous companions -------------------------------------------------

def hopf_models() -> tuple[HomogeneousModel, HomogeneousModel]:
    """S^3 with tau = vol over S^2 = SU(2)/U(1); the fibre is spanned by e1."""
    total = s3_model(1)
    base = HomogeneousModel(3, {(1, 2): {3: -2}, (2, 3): {1: -2}, (1, 3): {2: 2}},
                            la.eye(2, True), h=(1,))
    return total, base


def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0)


def _qconj(a):
    return (a[0], -a[1], -a[2], -a[3])


def _qsum(*qs):
    return tuple(sum(t) for t in zip(*qs))


def _qneg(a):
    return tuple(-x for x in a)


def _sp2_bracket(X, Y):
    """Bracket in sp(2) for [[p, -conj(q)], [q, r]] stored as (p, q, r)."""
    p, q, r = X
    P, Q, R = Y
    tl = _qsum(_qmul(p, P), _qneg(_qmul(P, p)), _qneg(_qmul(_qconj(q), Q)), _qmul(_qconj(Q), q))
    bl = _qsum(_qmul(q, P), _qneg(_qmul(Q, p)), _qmul(r, Q), _qneg(_qmul(R, q)))
    br = _qsum(_qmul(r, R), _qneg(_qmul(R, r)), _qneg(_qmul(q, _qconj(Q))), _qmul(Q, _qconj(q)))
    return tl, bl, br


@dataclass
class Sp2Data:
    model: HomogeneousModel
    alpha: Fraction
    delta: Fraction
    x: Fraction
    y: Fraction
    betas: tuple
    phi: Multivector


def sp2_model(delta=1, s=1) -> Sp2Data:
    """S^7 = Sp(2)/Sp(1) as a 3-(alpha, delta)-Sasaki space, alpha = s^2/delta.

    The vertical frame is delta times the imaginary units of the upper sp(1);
    the horizontal frame is s times the quaternion units.  The data alpha,
    delta and beta_i are read off from the Levi-Civita derivative of the
    vertical fields, which is -delta xi_j ∧ xi_k + alpha beta_i.
    """
    c1, c2 = parse_param(delta), parse_param(s)
    if not (isinstance(c1, Fraction) and isinstance(c2, Fraction)) or c1 == 0 or c2 == 0:
        raise ValueError("delta and s must be nonzero rationals")
    zero = (0, 0, 0, 0)
    units = [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    # -1 on the real unit orients H so that phi induces the frame orientation
    hunits = [(-1, 0, 0, 0)] + units
    basis = [(tuple(c1 * x for x in u), zero, zero) for u in units]
    basis += [(zero, tuple(c2 * x for x in u), zero) for u in hunits]
    basis += [(zero, zero, u) for u in units]

    def coords(X):
        p, q, r = X
        hq = [-q[0] / c2, q[1] / c2, q[2] / c2, q[3] / c2]
        return [p[1] / c1, p[2] / c1, p[3] / c1] + hq + [r[1], r[2], r[3]]

    br = {}
    for i, j in itertools.combinations(range(10), 2):
        v = coords(_sp2_bracket(basis[i], basis[j]))
        d = {k + 1: Fraction(x) for k, x in enumerate(v) if x != 0}
        if d:
            br[(i + 1, j + 1)] = d
    model = HomogeneousModel(10, br, la.eye(7, True), h=(8, 9, 10))
    L = model.levi_civita_map()
    derivs = []
    for i in range(3):
        terms = {(a + 1, b + 1): L[a][b, i] for a in range(7) for b in range(a + 1, 7)
                 if L[a][b, i] != 0}
        derivs.append(Multivector(7, 2, terms))
    hpart = [Multivector(7, 2, {k: v for k, v in d.terms.items() if min(k) >= 4})
             for d in derivs]
    d = -derivs[0].coef((2, 3))
    c = inner(bracket(hpart[0], hpart[1]), hpart[2]) / inner(hpart[2], hpart[2])
    alpha = -c / 2
    betas = tuple(h / alpha for h in hpart)
    x, y = d - 4 * alpha, alpha
    xw = [wedge(Multivector.basis(7, (i + 1,)), betas[i]) for i in range(3)]
    tau = x * VOL_V + y * _sum_forms(xw, 7, 3)
    phi = VOL_V + _sum_forms(xw, 7, 3)
    return Sp2Data(model.with_torsion(tau), alpha, d, x, y, betas, phi)


# -- registry ---------------------------------------------------------------------

CASES = {
    "2": (build_nearly_parallel, {"lam": 0}),
    "3a": (build_product_cy, {"x": 1, "y": 0}),
    "3b": (build_product_nk, {"x": 1, "y": 0, "sigma_norm2": 4}),
    "3c": (build_alpha_sasaki7, {"alpha": 1}),
    "3d": (build_twistor_s1, {"x": 1, "y": 0, "sigma_norm2": 4}),
    "3e": (build_ke_product, {"a": 1, "b": 1}),
    "4a": (build_space_form_hk, {"a": 1}),
    "4b": (build_r2_sasaki5, {"alpha": 1}),
    "4c": (lambda alpha=1, B=None: build_3ad_sasaki(alpha, 2 * parse_param(alpha), B),
           {"alpha": 1}),
    "5a": (lambda alpha=1, delta=1: build_3ad_sasaki(alpha, delta), {"alpha": 1, "delta": 1}),
    "5b": (build_nearly_parallel, {"lam": 1}),
}

_ROT = [[0, -1, 0], [1, 0, 0], [0, 0, 1]]
_REFL = [[-1, 0, 0], [0, -1, 0], [0, 0, 1]]
_KP = solve_kaehler_pair(8, 8)

GOLDEN_GRID = {
    "2": [("2", {"lam": 0}), ("3a", {"x": 1, "y": 0}), ("3a", {"x": "3/5", "y": "4/5"}),
          ("4a", {"a": 0})],
    "3a": [("3a", {"x": 1, "y": 0}), ("3a", {"x": 0, "y": 1}), ("3a", {"x": "3/5", "y": "4/5"}),
           ("3a", {"x": -1, "y": 0})],
    "3b": [("3b", {"x": 1, "y": 0, "sigma_norm2": 4}), ("3b", {"x": 0, "y": 1, "sigma_norm2": 4}),
           ("3b", {"x": "3/5", "y": "4/5", "sigma_norm2": 4}),
           ("3b", {"x": 2, "y": 0, "sigma_norm2": 1})],
    "3c": [("3c", {"alpha": 1}), ("3c", {"alpha": "1/2"}), ("3c", {"alpha": -2})],
    "3d": [("3d", {"x": 1, "y": 0, "sigma_norm2": 4}), ("3d", {"x": 0, "y": 1, "sigma_norm2": 4}),
           ("3d", {"x": "3/5", "y": "-4/5", "sigma_norm2": 4})],
    "3e": [("3e", {"a": _KP.a, "b": _KP.b}), ("3e", {"a": 1, "b": -2}), ("3e", {"a": 1, "b": 1}),
           ("3e", {"a": 0, "b": 1})],
    "4a": [("4a", {"a": 1}), ("4a", {"a": "1/2"}), ("4a", {"a": -3}), ("4a", {"a": 0})],
    "4b": [("4b", {"alpha": 1}), ("4b", {"alpha": "1/2"}), ("4b", {"alpha": -1})],
    "4c": [("4c", {"alpha": 1}), ("4c", {"alpha": "1/2"}), ("4c", {"alpha": 1, "B": _ROT}),
           ("4c", {"alpha": -1, "B": _REFL})],
    "5a": [("5a", {"alpha": 1, "delta": 1}), ("5a", {"alpha": 1, "delta": 5}),
           ("5a", {"alpha": 2, "delta": 1}), ("5a", {"alpha": 1, "delta": -1})],
    "5b": [("5b", {"lam": 1}), ("5b", {"lam": -2}), ("5b", {"lam": "1/3"})],
}


def build_case(label: str, **params) -> PointModel:
    if label not in CASES:
        raise ValueError(f"no constructor for case {label!r}; known: {', '.join(CASES)}")
    builder, defaults = CASES[label]
    kwargs = dict(defaults)
    kwargs.update(params)
    return builder(**kwargs)


def build_zoo() -> dict[str, PointModel]:
    return {label: build_case(label) for label in CASES}


def verify_all(tol: float = DEFAULT_TOL) -> list[dict]:
    """One row per grid point: case, parameters and the model checks."""
    rows = []
    for label, points in GOLDEN_GRID.items():
        for builder_label, params in points:
            m = build_case(builder_label, **params)
            rep = m.verify(tol)
            rows.append({"case": label, "builder": builder_label,
                         "params": {k: _param_out(parse_param(v)) if not isinstance(v, list)
                                    else _param_out(v) for k, v in params.items()},
                         **{k: v for k, v in rep.items()}})
    return rows
