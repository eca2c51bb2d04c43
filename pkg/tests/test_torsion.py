from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from g2torsion import _linalg as la
from g2torsion.exterior import Multivector, frame_vector, one_form, wedge
from g2torsion.g2 import PHI_STD
from g2torsion.torsion import (HomogeneousModel, codifferential_parallel, dform_oracle,
                               dform_parallel, holonomy_algebra, leftinvariant_curvature,
                               modified_torsion_flatness, nomizu_curvature,
                               parallel_torsion_checks, submersion_curvature_check,
                               torsion_is_parallel, torsion_split)
from g2torsion.zoo import (CASES, build_3ad_sasaki, build_case, build_product_nk, hopf_models,
                           s3_model, sp2_model)

from oracles import random_form


def e(n, s):
    return Multivector.from_string(n, s)


E1 = frame_vector(7, 1)
OMEGA7 = e(7, "e23 + e45 + e67")


def bi_invariant_curvature(model: HomogeneousModel) -> dict:
    """R(X, Y) Z = -1/4 [[X, Y], Z] for a bi-invariant metric, torsion ignored."""
    n = model.dim
    out = {}
    for a, b in itertools.combinations(range(1, n + 1), 2):
        w = model.bracket(frame_vector(n, a), frame_vector(n, b))
        M = la.zeros((n, n), True)
        for c in range(1, n + 1):
            M[:, c - 1] = -model.bracket(w, frame_vector(n, c)) / 4
        out[(a, b)] = M
    return out


def so3_over_so2(scale=1) -> HomogeneousModel:
    """S^2 as so(3)/so(2) with [e_i, e_j] = scale e_k; isotropy spanned by e1."""
    return HomogeneousModel(3, {(1, 2): {3: scale}, (2, 3): {1: scale}, (1, 3): {2: -scale}},
                            la.eye(2, True), h=(1,))


# -- pointwise torsion ---------------------------------------------------------

def test_torsion_split_examples():
    tau = Fraction(1, 2) * wedge(Multivector.basis(7, (1,)), OMEGA7)
    gamma, sigma = torsion_split(tau, E1)
    assert gamma == Fraction(1, 2) * OMEGA7 and sigma.is_zero()
    gamma, sigma = torsion_split(PHI_STD, E1)
    assert gamma == OMEGA7 and sigma == e(7, "e246 - e257 - e347 - e356")
    with pytest.raises(ValueError):
        torsion_split(PHI_STD, 2 * E1)


@given(st.integers(0, 2**32 - 1))
def test_torsion_split_reassembles(seed):
    rng = np.random.default_rng(seed)
    tau = random_form(7, 3, rng)
    i = int(rng.integers(1, 8))
    xi = frame_vector(7, i)
    gamma, sigma = torsion_split(tau, xi)
    assert wedge(one_form(xi), gamma) + sigma == tau
    assert all(i not in idx for idx in gamma.terms) and all(i not in idx for idx in sigma.terms)


@pytest.mark.parametrize("label", ["3c", "3e"])
def test_parallel_torsion_checks_on_models(label):
    m = build_case(label)
    rep = parallel_torsion_checks(m.tau, E1, OMEGA7)
    assert rep["ok"] and rep["gamma_11"] == 0


def test_parallel_torsion_checks_negative_control():
    # gamma = e24 is not of type (1,1) for J pairing (23), (45), (67)
    tau = wedge(Multivector.basis(7, (1,)), e(7, "e24"))
    rep = parallel_torsion_checks(tau, E1, OMEGA7)
    assert rep["gamma_tau"] == 0 and rep["gamma_sigma"] == 0
    assert rep["gamma_11"] > 0 and not rep["ok"]
    rep = parallel_torsion_checks(PHI_STD, E1)
    assert not rep["ok"]


def test_dform_examples():
    alpha = Fraction(3, 2)
    xi = Multivector.basis(7, (1,))
    tau = alpha * wedge(xi, OMEGA7)
    assert dform_parallel(tau, xi) == 2 * alpha * OMEGA7
    assert dform_oracle(tau, xi) == 2 * alpha * OMEGA7
    assert dform_parallel(Multivector(7, 3), PHI_STD).is_zero()


def test_phi_of_nearly_kaehler_product_is_closed_iff_y_zero():
    for y, closed in ((0, True), (1, False)):
        m = build_product_nk(x=1 - y, y=y)
        cod = codifferential_parallel(m.tau, m.phi)
        assert cod.is_zero() == closed


@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_dform_matches_oracle(seed, p):
    rng = np.random.default_rng(seed)
    tau, beta = random_form(7, 3, rng), random_form(7, p, rng)
    assert dform_parallel(tau, beta) == dform_oracle(tau, beta)


@pytest.mark.parametrize("label", sorted(CASES))
def test_d_squared_vanishes_on_phi(label):
    # phi and tau are both parallel, so d phi is parallel and d(d phi) is algebraic
    m = build_case(label)
    d1 = dform_parallel(m.tau, m.phi)
    assert dform_parallel(m.tau, d1).is_zero()


# -- homogeneous curvature -----------------------------------------------------

@pytest.mark.parametrize("a", [1, Fraction(1, 2), -3])
def test_s3_flat_for_tau_and_einstein_for_g(a):
    m = s3_model(a)
    assert m.curvature("tau").is_zero()
    Rg = m.curvature("g")
    assert la.array_is_zero(Rg.ricci() - 2 * a * a * la.eye(3, True))
    assert Rg.scalar() == 6 * a * a
    assert torsion_is_parallel(m)


def test_s3_matches_bi_invariant_oracle():
    m = s3_model(1)
    oracle = bi_invariant_curvature(m)
    Rg = m.curvature("g")
    for k, M in oracle.items():
        assert la.array_is_zero(Rg.ops[k] - M)
    assert Rg.component(1, 2, 2, 1) == 1


def test_leftinvariant_matches_nomizu_on_s3_and_products():
    space_form = build_case("4a", a=Fraction(1, 2)).homogeneous
    abelian = HomogeneousModel(4, {}, la.eye(4, True), random_form(4, 3, np.random.default_rng(1)))
    for m in (s3_model(1), s3_model(-3), space_form, abelian):
        li = leftinvariant_curvature(m)
        for kind, R in (("g", li.curvature_g), ("tau", li.curvature_tau)):
            N = nomizu_curvature(m, m.connection_map(kind))
            for k in R.ops:
                assert la.array_is_zero(R.ops[k] - N.ops[k])
    assert leftinvariant_curvature(abelian).curvature_g.is_zero()


def test_hyperbolic_plane_and_heisenberg():
    aff = HomogeneousModel(2, {(1, 2): {2: 1}}, la.eye(2, True))
    R = leftinvariant_curvature(aff).curvature_g
    assert R.component(1, 2, 2, 1) == -1
    heis = HomogeneousModel(3, {(1, 2): {3: 1}}, la.eye(3, True))
    li = leftinvariant_curvature(heis)
    half = Fraction(1, 2)
    assert la.array_is_zero(li.ricci_g - la.exact_array(np.diag([-half, -half, half])))
    assert li.curvature_g.scalar() == -half


def test_leftinvariant_rejects_isotropy():
    with pytest.raises(ValueError):
        leftinvariant_curvature(so3_over_so2())


def test_nomizu_round_sphere():
    R = nomizu_curvature(so3_over_so2())
    assert R.component(1, 2, 2, 1) == 1
    _, base = hopf_models()
    assert base.curvature("g").component(1, 2, 2, 1) == 4


def test_hopf_submersion():
    total, base = hopf_models()
    rep = submersion_curvature_check(total, base, 1, [2, 3], 1, e(2, "e12"))
    assert rep["gamma_matches"] and rep["sigma_basic"] and rep["holds"]
    bad = submersion_curvature_check(total, base, 1, [2, 3], 2, e(2, "e12"))
    assert not bad["gamma_matches"] and not bad["holds"] and bad["defect"] > 0
    with pytest.raises(ValueError):
        submersion_curvature_check(total, base, 1, [1, 3], 1, e(2, "e12"))


@pytest.mark.parametrize("delta, s", [(1, 1), (2, 1), (Fraction(1, 3), 1), (-1, 2)])
def test_modified_torsion_flatness(delta, s):
    data = sp2_model(delta, s)
    rep = modified_torsion_flatness(data.model, data.x, data.y)
    assert rep["flat_on_V"] and rep["K_matches"] and rep["controls_nonflat"]
    assert rep["K"] == data.delta ** 2 == (data.x + 4 * data.y) ** 2
    assert torsion_is_parallel(data.model)
    assert not torsion_is_parallel(data.model, -data.model.torsion)


def test_modified_torsion_lambda_vanishes_exactly_at_delta_two_alpha():
    # alpha = s^2/delta, so delta = 2 alpha has no rational sp(2) point; use the pointwise data
    assert build_3ad_sasaki(1, 2).params["lambda"] == 0
    assert build_3ad_sasaki(1, 3).params["lambda"] != 0
    data = sp2_model(3, 2)
    rep = modified_torsion_flatness(data.model, data.x, data.y)
    assert rep["lambda"] == -2 * (data.delta - 2 * data.alpha)


def test_modified_torsion_rejects_missing_block():
    data = sp2_model(1, 1)
    with pytest.raises(ValueError):
        modified_torsion_flatness(data.model, data.x, data.y, vertical=(1, 2))
    stretched = HomogeneousModel(3, {}, la.exact_array([[2, 0, 0], [0, 1, 0], [0, 0, 1]]))
    with pytest.raises(ValueError):
        modified_torsion_flatness(stretched, 0, 0)


def test_holonomy_algebras():
    assert holonomy_algebra(s3_model(1), "tau").dim == 0
    assert holonomy_algebra(s3_model(1), "g").dim == 3
    assert holonomy_algebra(so3_over_so2(), "g").dim == 1


def test_invalid_model_rejected():
    # [e1,e2] = e3, [e1,e3] = e1 breaks the Jacobi identity
    with pytest.raises(ValueError):
        HomogeneousModel(3, {(1, 2): {3: 1}, (1, 3): {1: 1}, (2, 3): {2: 1}}, la.eye(3, True))
    with pytest.raises(ValueError):
        HomogeneousModel(2, {}, la.exact_array([[1, 0], [0, -1]]))


def test_model_json_round_trip():
    m = sp2_model(1, 1).model
    back = HomogeneousModel.from_json(m.to_json())
    assert back.to_json() == m.to_json()


# -- curvature symmetries --------------------------------------------------------

_SYM_MODELS = [s3_model(1), sp2_model(1, 1).model, sp2_model(Fraction(1, 3), 1).model,
               so3_over_so2(2)]


@pytest.mark.parametrize("idx", range(len(_SYM_MODELS)))
def test_levi_civita_curvature_symmetries(idx):
    m = _SYM_MODELS[idx]
    R = m.curvature("g")
    assert R.metric_compatible() and R.pair_symmetric()
    for a, b, c in itertools.combinations(range(1, m.mdim + 1), 3):
        assert la.array_is_zero(R.bianchi_defect(a, b, c))


@pytest.mark.parametrize("idx", range(len(_SYM_MODELS)))
def test_parallel_torsion_curvature_is_pair_symmetric(idx):
    m = _SYM_MODELS[idx]
    R = m.curvature("tau")
    assert R.metric_compatible() and R.pair_symmetric()


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_random_torsion_curvature_is_metric_compatible(seed):
    rng = np.random.default_rng(seed)
    m = s3_model(1).with_torsion(random_form(3, 3, rng))
    R = m.curvature("tau")
    assert R.metric_compatible()
