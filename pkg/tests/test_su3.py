from __future__ import annotations

import itertools
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from g2torsion import _linalg as la
from g2torsion.exterior import (Multivector, contract, derive, form_to_endo, frame_vector, hodge,
                                inner, wedge)
from g2torsion.su3 import (OMEGA_STD, PSI_STD, STAR_PSI_STD, CubeRootFallback, SU3Structure,
                           lambda_contract, lemma_gen_suite, primitive_11_basis, su3_normalize,
                           type_project)

from oracles import unit

J = form_to_endo(OMEGA_STD)


def e(s):
    return Multivector.from_string(6, s)


def j_average(a: Multivector) -> Multivector:
    """Oracle for the (1,1) part of a 2-form: (a + a(J., J.)) / 2."""
    out = {}
    for I in itertools.combinations(range(1, 7), 2):
        X, Y = unit(6, I[0]), unit(6, I[1])
        c = (a.evaluate(X, Y) + a.evaluate(J @ X, J @ Y)) / 2
        if c != 0:
            out[I] = c
    return Multivector(6, 2, out)


def lambda_oracle(a: Multivector) -> Multivector:
    """<L a, b> = <a, omega ∧ b> on basis monomials b."""
    p = a.degree - 2
    out = {}
    for I in itertools.combinations(range(1, 7), p):
        c = inner(a, wedge(OMEGA_STD, Multivector.basis(6, I)))
        if c != 0:
            out[I] = c
    return Multivector(6, p, out)


def check_frame(o, p, F, tol=1e-9):
    oo = o if la.is_exact_array(F) else o.to_float()
    pp = p if la.is_exact_array(F) else p.to_float()
    return (oo.pullback(F) - OMEGA_STD).is_zero(tol) and (pp.pullback(F) - PSI_STD).is_zero(tol)


# -- examples -------------------------------------------------------------------

def test_standard_structure_is_valid():
    s = SU3Structure(OMEGA_STD, PSI_STD)
    assert s.is_valid()
    assert la.array_is_zero(s.J @ s.J + la.eye(6, True))
    assert derive(J, derive(J, PSI_STD)) == -9 * PSI_STD
    assert inner(PSI_STD, PSI_STD) == 4


def test_type_project_examples():
    assert type_project(PSI_STD, 3, 0) == PSI_STD
    a = e("e12 - e34")
    assert type_project(a, 2, 1) == a
    b = e("e13")
    assert j_average(b) == e("1/2 e13 + 1/2 e24")
    assert type_project(b, 2, 1) == j_average(b)


def test_type_project_rejects_bad_arguments():
    with pytest.raises(ValueError):
        type_project(PSI_STD, 2, 0)
    with pytest.raises(ValueError):
        type_project(OMEGA_STD, 2, 2)


def test_lambda_examples():
    assert lambda_contract(OMEGA_STD) == Multivector.scalar(6, 3)
    assert lambda_contract(PSI_STD).is_zero()
    ww = wedge(OMEGA_STD, OMEGA_STD)
    assert lambda_oracle(ww) == 4 * OMEGA_STD
    assert lambda_contract(ww) == 4 * OMEGA_STD


def test_normalize_standard_is_identity():
    nf = su3_normalize(OMEGA_STD, PSI_STD)
    assert nf.exact and la.array_is_zero(nf.frame - la.eye(6, True))


def test_normalize_star_psi():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CubeRootFallback)
        nf = su3_normalize(OMEGA_STD, STAR_PSI_STD)
    assert nf.x == 0 and nf.y == 1
    assert math.isclose(nf.theta, -math.pi / 6)
    assert check_frame(OMEGA_STD, STAR_PSI_STD, nf.frame)


def test_normalize_exact_rational_cube_root():
    # x - iy = (c + is)^3 with c = 3/5, s = 4/5 stays exact
    c, s = Fraction(3, 5), Fraction(4, 5)
    x, y = c**3 - 3 * c * s * s, -(3 * c * c * s - s**3)
    psi = x * PSI_STD + y * STAR_PSI_STD
    nf = su3_normalize(OMEGA_STD, psi)
    assert nf.exact and not nf.fallback
    assert check_frame(OMEGA_STD, psi, nf.frame)


def test_normalize_irrational_root_falls_back_with_warning():
    psi = Fraction(3, 5) * PSI_STD + Fraction(4, 5) * STAR_PSI_STD
    with pytest.warns(CubeRootFallback):
        nf = su3_normalize(OMEGA_STD, psi)
    assert nf.fallback
    assert check_frame(OMEGA_STD, psi, nf.frame)


def test_normalize_rejects_invalid():
    with pytest.raises(ValueError):
        su3_normalize(OMEGA_STD, 2 * PSI_STD)
    with pytest.raises(ValueError):
        su3_normalize(-OMEGA_STD, PSI_STD)


def test_other_cube_roots_give_equivalent_frames():
    nf = su3_normalize(OMEGA_STD, PSI_STD)
    for k in (1, 2):
        t = 2 * math.pi * k / 3
        F = la.float_array(nf.frame).copy()
        G = F.copy()
        for j in range(3):
            a, b = F[:, 2 * j], F[:, 2 * j + 1]
            G[:, 2 * j] = math.cos(t) * a - math.sin(t) * b
            G[:, 2 * j + 1] = math.sin(t) * a + math.cos(t) * b
        assert check_frame(OMEGA_STD, PSI_STD, G)


def test_lemma_gen_examples():
    assert lemma_gen_suite(SU3Structure(OMEGA_STD, PSI_STD)).ok
    assert lemma_gen_suite(SU3Structure(OMEGA_STD, STAR_PSI_STD)).ok
    rep = lemma_gen_suite(SU3Structure(OMEGA_STD, 2 * PSI_STD))
    assert not rep["|psi|^2 = 4"]
    assert rep["J_* psi = 3 *psi"] and rep["J_* (*psi) = -3 psi"]


# -- properties -----------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3])
def test_type_projectors_sum_to_identity(p):
    for I in itertools.combinations(range(1, 7), p):
        a = Multivector.basis(6, I)
        total = sum((type_project(a, p, l) for l in range(p // 2 + 1)), Multivector(6, p))
        assert total == a


def test_types_commute_or_anticommute_with_J():
    for I in itertools.combinations(range(1, 7), 2):
        a = Multivector.basis(6, I)
        A11 = form_to_endo(type_project(a, 2, 1))
        A20 = form_to_endo(type_project(a, 2, 0))
        assert la.array_is_zero(A11 @ J - J @ A11)
        assert la.array_is_zero(A20 @ J + J @ A20)


def test_primitive_11_basis_has_dimension_8_and_kills_psi():
    basis = primitive_11_basis()
    assert len(basis) == 8
    for b in basis:
        assert inner(b, OMEGA_STD) == 0
        assert derive(b, PSI_STD).is_zero() and derive(b, STAR_PSI_STD).is_zero()


def test_contraction_with_psi_is_injective():
    rows = [[contract(frame_vector(6, i), PSI_STD).coef(K)
             for K in itertools.combinations(range(1, 7), 2)] for i in range(1, 7)]
    assert la.rank(np.array(rows, dtype=object)) == 6
    for i in range(1, 7):
        X = contract(frame_vector(6, i), PSI_STD)
        assert type_project(X, 2, 0) == X


def test_normalize_is_idempotent():
    nf = su3_normalize(OMEGA_STD, PSI_STD)
    again = su3_normalize(OMEGA_STD.pullback(nf.frame), PSI_STD.pullback(nf.frame))
    assert la.array_is_zero(again.frame - la.eye(6, True))


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_normalize_rational_conjugates(seed):
    Q = la.cayley_rotation(6, np.random.default_rng(seed))
    o, p = OMEGA_STD.pushforward(Q), PSI_STD.pushforward(Q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CubeRootFallback)
        nf = su3_normalize(o, p)
    assert check_frame(o, p, nf.frame)
    F = la.float_array(nf.frame)
    assert np.allclose(F.T @ F, np.eye(6), atol=1e-9)
    assert abs(np.linalg.det(F) - 1) < 1e-9


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_lemma_gen_on_float_conjugates(seed):
    Q = la.random_rotation(6, np.random.default_rng(seed))
    s = SU3Structure(OMEGA_STD.to_float().pushforward(Q), PSI_STD.to_float().pushforward(Q))
    assert lemma_gen_suite(s, 1e-9).ok
