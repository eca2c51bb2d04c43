"""G2-structures on R^7: recognition, adapted frames and reductions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .exterior import (Multivector, bracket, contract, derive, extend_form, form_to_endo,
                       frame_vector, hodge, inner, one_form, restrict_form, wedge)
from .linrep import stabilizer_algebra
from .su3 import SU3Structure, su3_normalize

__all__ = [
    "PHI_STD",
    "BETA_STD",
    "PHI_X_CONSTANT",
    "G2Structure",
    "G2Check",
    "Reduction",
    "CalibratedReduction",
    "standard_phi",
    "is_g2",
    "adapted_basis",
    "complement_frame",
    "reduce_along",
    "extend_su3",
    "calibrated_reduce",
    "phicom_assemble",
    "selfdual_split",
    "phi_x_action",
]

PHI_STD = Multivector.from_string(7, "e123 + e145 + e167 + e246 - e257 - e347 - e356")
BETA_STD = (
    Multivector.from_string(4, "e12 + e34"),
    Multivector.from_string(4, "e13 - e24"),
    Multivector.from_string(4, "-e14 - e23"),
)

# (phi_X)_* phi = PHI_X_CONSTANT * X _| *phi for every X, with phi_X = X _| phi.
# The value is measured at X = e_1 on the standard form (see phi_x_action).
PHI_X_CONSTANT = -3


@dataclass
class G2Structure:
    phi: Multivector
    adapted_frame: np.ndarray | None = None

    def certificate_holds(self, tol: float = DEFAULT_TOL) -> bool:
        if self.adapted_frame is None:
            return False
        F = self.adapted_frame
        phi = self.phi if la.is_exact_array(F) else self.phi.to_float()
        return (phi.pullback(F) - PHI_STD).is_zero(tol)


def standard_phi() -> G2Structure:
    return G2Structure(PHI_STD, la.eye(7))


@dataclass
class G2Check:
    is_g2: bool
    stabilizer_dim: int
    adapted_frame: np.ndarray | None = None
    orientation: int = 0
    reason: str = ""

    def to_dict(self) -> dict:
        out = {"is_g2": self.is_g2, "stabilizer_dim": self.stabilizer_dim}
        if self.adapted_frame is not None:
            F = self.adapted_frame
            out["adapted_frame"] = [[str(x) if la.is_exact_scalar(x) else float(x) for x in row]
                                    for row in F]
            out["orientation"] = self.orientation
        if self.reason:
            out["reason"] = self.reason
        return out


def complement_frame(xi: np.ndarray, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal frame N of xi^perp with det[xi, N] = +1.

    For a coordinate axis the remaining coordinate vectors are used, with the
    first one negated when needed for orientation; this stays exact.
    """
    xi = np.asarray(xi)
    n = len(xi)
    exact = la.is_exact_array(xi)
    nz = [i for i in range(n) if not la.is_zero(xi[i], tol)]
    if len(nz) == 1 and la.is_zero(abs(xi[nz[0]]) - 1, tol):
        k = nz[0]
        rest = [la.eye(n, exact)[:, i] for i in range(n) if i != k]
    else:
        rest = la.gram_schmidt([xi] + [la.eye(n, la.is_exact_array(xi))[:, i] for i in range(n)],
                               tol=tol)[1:]
    rest = [np.asarray(v) for v in rest]
    sign = la.det(np.array([xi] + rest, dtype=object if all(
        la.is_exact_array(v) for v in [xi] + rest) else float).T)
    if sign < 0:
        rest[0] = -rest[0]
    return rest


def is_g2(phi: Multivector, tol: float = DEFAULT_TOL) -> G2Check:
    """Decide whether phi is a G2 3-form compatible with the Euclidean metric."""
    if phi.dim != 7 or phi.degree != 3:
        return G2Check(False, -1, reason="expected a 3-form on R^7")
    stab = stabilizer_algebra([phi], tol).dim
    if stab != 14:
        return G2Check(False, stab, reason=f"stabilizer has dimension {stab}")
    try:
        F, orient = adapted_basis(phi, tol)
    except ValueError as exc:
        return G2Check(False, stab, reason=str(exc))
    return G2Check(True, stab, F, orient)


def adapted_basis(phi: Multivector, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, int]:
    """Orthonormal frame (columns) in which phi is standard, and its orientation sign.

    The axis is the first frame vector maximizing |e_k _| phi|^2; its
    complement carries an SU(3)-structure which is then normalized.
    """
    norms = [inner(contract(frame_vector(7, k), phi), contract(frame_vector(7, k), phi))
             for k in range(1, 8)]
    best = max(range(7), key=lambda k: (float(norms[k]), -k))
    xi = frame_vector(7, best + 1)
    N = complement_frame(xi, tol)
    omega6 = restrict_form(contract(xi, phi), N)
    vol6 = (wedge(omega6, wedge(omega6, omega6)) / 6).coef(range(1, 7))
    orient = 1
    if not la.is_zero(vol6 - 1, tol):
        if not la.is_zero(vol6 + 1, tol):
            raise ValueError("reduced 2-form is not a unit Kaehler form")
        # phi induces the opposite orientation: reverse the complement frame
        N = [-N[0]] + N[1:]
        orient = -1
        omega6 = restrict_form(contract(xi, phi), N)
    red = reduce_along(phi, xi, tol, frame=N)
    s = red.su3()
    nf = su3_normalize(s.omega, s.psi, tol)
    G = nf.frame
    Nm = np.array(N).T
    if not la.is_exact_array(G):
        Nm = la.float_array(Nm)
    cols = [np.asarray(xi, dtype=Nm.dtype)] + [Nm @ G[:, j] for j in range(6)]
    F = np.array(cols).T
    ph = phi if la.is_exact_array(F) else phi.to_float()
    if not (ph.pullback(F) - PHI_STD).is_zero(max(tol, 1e-9)):
        raise ValueError("adapted frame does not reproduce the standard form")
    return F, orient


@dataclass
class Reduction:
    """phi = xi ∧ omega + psi, with a frame of xi^perp for restriction."""

    xi: np.ndarray
    omega: Multivector
    psi: Multivector
    frame: list[np.ndarray]

    def su3(self) -> SU3Structure:
        return SU3Structure(restrict_form(self.omega, self.frame),
                            restrict_form(self.psi, self.frame))


def reduce_along(phi: Multivector, xi: np.ndarray, tol: float = DEFAULT_TOL,
                 frame: list[np.ndarray] | None = None) -> Reduction:
    xi = np.asarray(xi)
    if not la.is_zero(xi @ xi - 1, tol):
        raise ValueError("axis must be a unit vector")
    omega = contract(xi, phi)
    psi = phi - wedge(one_form(xi), omega)
    return Reduction(xi, omega, psi, frame if frame is not None else complement_frame(xi, tol))


def extend_su3(omega: Multivector, psi: Multivector, axis: np.ndarray,
               tol: float = DEFAULT_TOL) -> G2Structure:
    """The G2 form xi ∧ omega + psi for SU(3) data on the complement of the axis."""
    bad = SU3Structure(omega, psi).violations(tol)
    if bad:
        raise ValueError("not an SU(3)-structure: " + "; ".join(bad))
    axis = np.asarray(axis)
    N = complement_frame(axis, tol)
    phi = wedge(one_form(axis), extend_form(omega, N)) + extend_form(psi, N)
    return G2Structure(phi)


@dataclass
class CalibratedReduction:
    plane: list[np.ndarray]
    complement: list[np.ndarray]
    betas: tuple[Multivector, Multivector, Multivector]
    checks: dict = field(default_factory=dict)


def _beta_checks(betas, tol: float) -> dict:
    out = {}
    out["self_dual"] = all((hodge(b) - b).is_zero(tol) for b in betas)
    out["norm_2"] = all(la.is_zero(inner(b, b) - 2, tol) for b in betas)
    out["brackets"] = all((bracket(betas[i], betas[j]) + 2 * betas[k]).is_zero(tol)
                          for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)))
    return out


def calibrated_reduce(phi: Multivector, plane: list[np.ndarray],
                      tol: float = DEFAULT_TOL) -> CalibratedReduction:
    """Split phi = vol_P + sum p^i ∧ beta_i along a calibrated 3-plane P."""
    plane = [np.asarray(v) for v in plane]
    G = np.array([[p @ q for q in plane] for p in plane])
    if not la.array_is_zero(G - la.eye(3, la.is_exact_array(G)), tol):
        raise ValueError("plane vectors are not orthonormal")
    cal = phi.evaluate(*plane)
    if not la.is_zero(cal - 1, tol):
        raise ValueError(f"plane is not calibrated: phi(p1,p2,p3) = {cal}")
    n = phi.dim
    exact = all(la.is_exact_array(p) for p in plane)
    vecs = la.gram_schmidt(plane + [la.eye(n, exact)[:, i] for i in range(n)], tol=tol)[3:]
    comp = [np.asarray(v) for v in vecs]
    M = np.array(plane + comp, dtype=object if all(la.is_exact_array(v) for v in plane + comp)
                 else float).T
    if la.det(M) < 0:
        comp[0] = -comp[0]
    betas = tuple(restrict_form(contract(p, phi), comp) for p in plane)
    return CalibratedReduction(plane, comp, betas, _beta_checks(betas, tol))


def phicom_assemble(phi1: Multivector, phi2: Multivector, phi3: Multivector,
                    tol: float = DEFAULT_TOL) -> tuple[np.ndarray, G2Structure]:
    """Frame of R^4 turning (phi1, phi2, phi3) into the standard betas, and the G2 form.

    Requires self-dual forms with [phi_i, phi_j] = -2 phi_k.  Their norms are
    then forced to be 2, and f1, J1 f1, J2 f1, J1 J2 f1 is the frame.
    """
    phis = (phi1, phi2, phi3)
    if any(p.dim != 4 or p.degree != 2 for p in phis):
        raise ValueError("expected three 2-forms on R^4")
    if not all((hodge(p) - p).is_zero(tol) for p in phis):
        raise ValueError("inputs must be self-dual")
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        defect = bracket(phis[i], phis[j]) + 2 * phis[k]
        if not defect.is_zero(tol):
            raise ValueError(f"[phi{i + 1}, phi{j + 1}] + 2 phi{k + 1} = {defect}")
    if any(p.is_zero(tol) for p in phis):
        raise ValueError("the forms vanish; they must all be nonzero")
    J1, J2 = form_to_endo(phi1), form_to_endo(phi2)
    exact = la.is_exact_array(J1) and la.is_exact_array(J2)
    f1 = la.eye(4, exact)[:, 0]
    f3 = J2 @ f1
    F = np.array([f1, J1 @ f1, f3, J1 @ f3]).T
    for p, b in zip(phis, BETA_STD):
        pp = p if la.is_exact_array(F) else p.to_float()
        if not (pp.pullback(F) - b).is_zero(tol):
            raise ValueError("constructed frame does not normalize the forms")
    H = [frame_vector(7, i) for i in range(4, 8)]
    phi = Multivector.basis(7, (1, 2, 3))
    for i, p in enumerate(phis):
        phi = phi + wedge(Multivector.basis(7, (i + 1,)), extend_form(p, H))
    cert = la.eye(7, la.is_exact_array(F))
    cert[3:, 3:] = F
    return F, G2Structure(phi, cert)


def selfdual_split(a: Multivector) -> tuple[Multivector, Multivector]:
    if a.dim != 4 or a.degree != 2:
        raise ValueError("expected a 2-form on R^4")
    star = hodge(a)
    return (a + star) / 2, (a - star) / 2


def phi_x_action(X: np.ndarray, phi: Multivector = PHI_STD) -> tuple[Multivector, Multivector]:
    """Return ((phi_X)_* phi, X _| *phi) with phi_X = X _| phi."""
    return derive(contract(X, phi), phi), contract(X, hodge(phi))
