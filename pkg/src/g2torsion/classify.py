"""Decision tree sorting pointwise models into the cases of the classification.

The tree branches on d, the dimension of the space of vectors fixed by the
holonomy algebra: d = 1 splits T = V + H along the standard decomposition,
d >= 2 reads off the forms gamma_i = xi_i _| tau on H, and d = 0 names the
holonomy algebra.  Labels are those of ``zoo.CASE_LABELS``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .exterior import (Multivector, contract, derive, hodge, inner, one_form, restrict_form,
                       wedge)
from .linrep import (LieSubalgebra, SubspaceSplit, annihilated_vectors, identify_algebra,
                     lie_closure, stabilizer_algebra, standard_split)
from .torsion import parallel_torsion_checks
from .zoo import GOLDEN_GRID, PointModel, build_case, lemma_com_det_check, lift

__all__ = [
    "OUTSIDE",
    "ClassificationReport",
    "classify",
    "classify6",
    "branch_d1",
    "golden_table",
]

OUTSIDE = "outside theorem hypotheses"

# pairs of labels that may be reported together
OVERLAPS = ({"5a", "5b"}, {"2", "3a"}, {"2", "4a"})

_SU3_FROM_7 = {"1": "su3-1", "2": "su3-2", "3a": "su3-2", "3b": "su3-3", "4b": "su3-4"}


@dataclass
class ClassificationReport:
    d: int
    split: SubspaceSplit | None = None
    branch_trace: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    evidence: dict = field(default_factory=dict)
    verdict: str = ""
    caveats: list = field(default_factory=list)

    @property
    def resolved(self) -> bool:
        return bool(self.labels)

    def trace(self, test: str, value, threshold="") -> None:
        self.branch_trace.append((test, value, threshold))

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "labels": list(self.labels),
            "verdict": self.verdict,
            "branch_trace": [[t, _out(v), _out(th)] for t, v, th in self.branch_trace],
            "evidence": {k: _out(v) for k, v in sorted(self.evidence.items())},
        }
        if self.split is not None:
            out["split"] = {"vertical": self.split.dims[0], "horizontal": self.split.dims[1]}
        if self.caveats:
            out["caveats"] = list(self.caveats)
        return out


def _out(v):
    if isinstance(v, Multivector):
        return v.to_dict()
    if isinstance(v, (bool, str, int)) or v is None:
        return v
    if la.is_exact_scalar(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_out(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_out(x) for x in v.tolist()]
    return float(v)


def _zero(x, exact: bool, tol: float) -> bool:
    # exact equality in exact mode, |x| < tol in float mode
    if exact and la.is_exact_scalar(x):
        return x == 0
    return abs(float(x)) < tol


def _hol(model: PointModel, rep: ClassificationReport, tol: float) -> LieSubalgebra:
    if model.hol_generators:
        return lie_closure(model.hol_generators, model.dim, tol)
    rep.caveats.append("upper-bound holonomy: stabilizer of {phi, tau} used")
    return stabilizer_algebra([model.phi, model.tau], tol)


def _finish(rep: ClassificationReport, labels: list[str], tau_zero: bool) -> ClassificationReport:
    labels = list(labels)
    if tau_zero and "2" not in labels:
        labels.append("2")
    rep.labels = labels
    rep.verdict = ",".join(labels) if labels else OUTSIDE
    return rep


def _exact(model: PointModel) -> bool:
    return model.phi.is_exact and model.tau.is_exact and all(
        la.is_exact_array(A) for A in model.hol_generators)


def classify(model: PointModel, tol: float = 1e-9) -> ClassificationReport:
    """Run the decision tree on a 7-dimensional model."""
    if model.dim != 7:
        raise ValueError("classify expects a 7-dimensional model; use classify6")
    exact = _exact(model)
    rep = ClassificationReport(d=-1)
    hol = _hol(model, rep, tol)
    # holonomy must fix phi and tau
    fixes = all((stab_defect(A, model.phi) <= tol) and (stab_defect(A, model.tau) <= tol)
                for A in hol.basis)
    rep.trace("hol preserves phi and tau", fixes)
    tau_zero = model.tau.is_zero(tol)
    rep.evidence["tau_norm"] = model.tau.max_abs()
    if not fixes:
        return _finish(rep, [], False)
    vecs = annihilated_vectors(hol)
    d = len(vecs)
    rep.d = d
    rep.trace("d = dim Par", d)
    frame = la.gram_schmidt(vecs, tol=tol)
    worst = 0.0
    for xi in frame:
        chk = parallel_torsion_checks(model.tau, xi, tol=tol)
        worst = max(worst, chk["gamma_tau"], chk["gamma_sigma"])
    rep.evidence["parallel_torsion_defect"] = worst
    rep.trace("(tau_xi)_* tau = 0 for parallel xi", worst <= tol, tol)
    if worst > tol:
        return _finish(rep, [], False)
    rep.trace("nabla^tau R^tau = 0 test", "skipped for pointwise data")
    if d == 1:
        labels = branch_d1(model, frame[0], hol, rep, tol, exact)
    elif d >= 2:
        labels = _branch_d3(model, frame, hol, rep, tol, exact)
    else:
        labels = _branch_d0(model, hol, rep, tol, exact)
    return _finish(rep, labels, tau_zero)


def stab_defect(A: np.ndarray, f: Multivector) -> float:
    return derive(A, f).max_abs()


def branch_d1(model: PointModel, xi: np.ndarray, hol: LieSubalgebra,
              rep: ClassificationReport, tol: float = 1e-9, exact: bool = False) -> list[str]:
    """One parallel vector: dim H is 6 or 4, then the (alpha, sigma) or (a + 2b) branches."""
    split = standard_split(hol)
    rep.split = split
    dimH = split.horizontal.dim
    rep.trace("dim H", dimH, "{4, 6}")
    phi, tau = model.phi, model.tau
    omega = contract(xi, phi)
    psi = phi - wedge(one_form(xi), omega)
    gamma = contract(xi, tau)
    sigma = tau - wedge(one_form(xi), gamma)
    if dimH == 6:
        alpha = inner(gamma, omega) / inner(omega, omega)
        g_def = (gamma - alpha * omega).max_abs()
        rep.evidence["gamma_11_defect"] = g_def
        rep.evidence["alpha"] = alpha
        rep.trace("gamma = alpha omega", g_def <= tol, tol)
        if g_def > tol:
            return []
        psi2 = contract(xi, hodge(phi))
        a = inner(sigma, psi) / inner(psi, psi)
        b = inner(sigma, psi2) / inner(psi2, psi2)
        s_def = (sigma - a * psi - b * psi2).max_abs()
        rep.evidence["sigma_type_defect"] = s_def
        rep.evidence["sigma_a"], rep.evidence["sigma_b"] = a, b
        rep.trace("sigma = a psi + b *psi", s_def <= tol, tol)
        if s_def > tol:
            return []
        alpha0 = _zero(alpha, exact, tol)
        sigma0 = sigma.is_zero(tol)
        rep.trace("alpha = 0", alpha0)
        rep.trace("sigma = 0", sigma0)
        if alpha0:
            return ["3a"] if sigma0 else ["3b"]
        if sigma0:
            return ["3c"]
        rep.trace("alpha J_* sigma = 0 violated", True)
        return []
    if dimH == 4:
        V = split.vertical
        vbasis = [v for v in la.gram_schmidt([xi] + V.basis(tol), tol=tol)[1:]]
        if len(vbasis) != 2:
            rep.trace("dim V0", len(vbasis), 2)
            return []
        v1, v2 = vbasis
        omega_v = omega.evaluate(v1, v2) * wedge(one_form(v1), one_form(v2))
        omega_0 = omega - omega_v
        # gamma = a e1 ∧ e2 + b omega_0 with e1, e2 spanning V0
        a = inner(gamma, omega_v) / inner(omega_v, omega_v)
        b = inner(gamma, omega_0) / inner(omega_0, omega_0)
        g_def = (gamma - a * omega_v - b * omega_0).max_abs()
        rep.evidence["a"], rep.evidence["b"] = a, b
        rep.evidence["gamma_ab_defect"] = g_def
        rep.trace("gamma = a e12 + b omega_0", g_def <= tol, tol)
        if g_def > tol:
            return []
        sigma0 = sigma.is_zero(tol)
        rep.trace("sigma = 0", sigma0)
        s = a + 2 * b
        rep.evidence["a_plus_2b"] = s
        if sigma0:
            # the surface factor carries the coefficient a; a = 0 splits off a flat factor
            a0 = _zero(a, exact, tol)
            rep.trace("a = 0", a0)
            return [] if a0 else ["3e"]
        rep.trace("a + 2b = 0", _zero(s, exact, tol))
        return ["3d"] if _zero(s, exact, tol) else []
    return []


def _branch_d3(model: PointModel, frame: list[np.ndarray], hol: LieSubalgebra,
               rep: ClassificationReport, tol: float, exact: bool) -> list[str]:
    phi, tau = model.phi, model.tau
    rep.trace("d", len(frame), 3)
    if len(frame) != 3:
        return []
    x1, x2 = frame[0], frame[1]
    x3 = np.array([phi.evaluate(x1, x2, e) for e in la.eye(7, la.is_exact_array(x1))],
                  dtype=x1.dtype)
    in_span = la.rank(np.array(frame + [x3], dtype=x1.dtype).T, tol) == 3
    rep.trace("xi3 = phi(xi1, xi2) is parallel", in_span)
    if not in_span:
        return []
    plane = [x1, x2, x3]
    rest = la.gram_schmidt(plane + list(la.eye(7, la.is_exact_array(x3))), tol=tol)[3:]
    M = np.array(plane + rest, dtype=object if all(la.is_exact_array(v) for v in plane + rest)
                 else float).T
    if la.det(M) < 0:
        rest[0] = -rest[0]
    a = tau.evaluate(x1, x2, x3)
    gammas = []
    recon = a * wedge(wedge(one_form(x1), one_form(x2)), one_form(x3))
    for i, xi in enumerate(plane):
        j, k = plane[(i + 1) % 3], plane[(i + 2) % 3]
        g = contract(xi, tau) - a * wedge(one_form(j), one_form(k))
        g4 = restrict_form(g, rest)
        gammas.append(g4)
        recon = recon + wedge(one_form(xi), g)
    shape = (tau - recon).max_abs()
    rep.evidence["a"] = a
    rep.evidence["tau_shape_defect"] = shape
    rep.trace("tau = a vol_V + sum xi_i ∧ gamma_i", shape <= tol, tol)
    if shape > tol:
        return []
    sd = max((hodge(g) - g).max_abs() for g in gammas)
    rep.trace("gamma_i self-dual", sd <= tol, tol)
    if sd > tol:
        return []
    cd = lemma_com_det_check(gammas, a, tol)
    rep.evidence["com_defect"] = cd["com_defect"]
    rep.trace("[gamma_i, gamma_j] = a gamma_k", cd["com"], tol)
    rep.trace("a |gamma_i|^2 = -4 det A", cd["det_identity"], tol)
    if not (cd["com"] and cd["det_identity"]):
        return []
    A = cd["A"]
    r = la.rank(A, tol) if la.is_exact_array(A) else np.linalg.matrix_rank(
        la.float_array(A), tol)
    rep.evidence["gamma_span"] = r
    rep.trace("dim span gamma_i", r, "{0, 1, 3}")
    if r == 0:
        return ["4a"]
    if r == 1:
        rep.trace("a = 0", _zero(a, exact, tol))
        return ["4b"] if _zero(a, exact, tol) else []
    if r == 3:
        return ["4c"]
    return []


def _branch_d0(model: PointModel, hol: LieSubalgebra, rep: ClassificationReport,
               tol: float, exact: bool) -> list[str]:
    name = identify_algebra(hol)
    rep.evidence["holonomy"] = name
    rep.trace("holonomy algebra", name)
    phi, tau = model.phi, model.tau
    if name == "g2":
        lam = inner(tau, phi) / inner(phi, phi)
        d = (tau - lam * phi).max_abs()
        rep.evidence["lambda"] = lam
        rep.trace("tau = lambda phi", d <= tol, tol)
        if d > tol:
            return []
        return ["2"] if _zero(lam, exact, tol) else ["5b"]
    if name in ("su2_c", "u1_plus_su2c", "so3_irr"):
        rep.caveats.append("case 1 inferred from the holonomy algebra alone")
        return ["1"]
    if name != "su2_plus_su2c":
        return []
    split = standard_split(hol)
    rep.split = split
    blocks = [b for b in split.vertical_blocks + split.horizontal_blocks if b.dim == 3]
    if len(blocks) != 1:
        return []
    plane = la.gram_schmidt(blocks[0].basis(tol), tol=tol)
    vol = wedge(wedge(one_form(plane[0]), one_form(plane[1])), one_form(plane[2]))
    if phi.evaluate(*plane) < 0:
        vol = -vol
    x = inner(tau, vol)
    rest = phi - vol
    y = inner(tau, rest) / inner(rest, rest)
    d = (tau - x * vol - y * rest).max_abs()
    rep.evidence["x"], rep.evidence["y"] = x, y
    rep.trace("tau = x vol_V + y sum xi_i ∧ beta_i", d <= tol, tol)
    if d > tol:
        return []
    rep.trace("alpha = y = 0", _zero(y, exact, tol))
    if _zero(y, exact, tol):
        return []
    alpha, delta = y, x + 4 * y
    rep.evidence["alpha"], rep.evidence["delta"] = alpha, delta
    rep.evidence["lambda"] = -2 * (x + 2 * y)
    parallel = _zero(delta - 2 * alpha, exact, tol)
    rep.trace("delta = 2 alpha", parallel)
    if parallel:
        return ["4c"]
    labels = ["5a"]
    if _zero(delta - 5 * alpha, exact, tol):
        rep.trace("delta = 5 alpha (tau = alpha phi)", True)
        labels.append("5b")
    return labels


def classify6(model: PointModel, tol: float = 1e-9) -> ClassificationReport:
    """Classify a 6-dimensional SU(3) model through its product with a line."""
    if model.dim != 6:
        raise ValueError("classify6 expects a 6-dimensional model")
    rep = classify(lift(model, 1), tol)
    labels = sorted({_SU3_FROM_7[l] for l in rep.labels if l in _SU3_FROM_7})
    if "4a" in rep.labels and not model.tau.is_zero(tol):
        labels = sorted(set(labels) | {"su3-1"})
    rep.evidence["labels7"] = list(rep.labels)
    rep.labels = labels
    rep.verdict = ",".join(labels) if labels else OUTSIDE
    return rep


def golden_table(tol: float = 1e-9) -> list[dict]:
    """Classify every point of the zoo grid; ``ok`` when the declared label is found."""
    rows = []
    for label, points in GOLDEN_GRID.items():
        for builder_label, params in points:
            m = build_case(builder_label, **params)
            rep = classify(m, tol)
            rows.append({"case": label, "builder": builder_label, "params": params,
                         "labels": rep.labels, "ok": label in rep.labels})
    return rows
