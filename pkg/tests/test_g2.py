from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from g2torsion import _linalg as la
from g2torsion.exterior import (Multivector, contract, derive, frame_vector, hodge, inner,
                                volume)
from g2torsion.g2 import (BETA_STD, PHI_STD, PHI_X_CONSTANT, G2Structure, adapted_basis,
                          calibrated_reduce, extend_su3, is_g2, phi_x_action, phicom_assemble,
                          reduce_along, selfdual_split, standard_phi)
from g2torsion.linrep import stabilizer_algebra
from g2torsion.su3 import OMEGA_STD, PSI_STD, SU3Structure

from oracles import rotation


def e(n, s):
    return Multivector.from_string(n, s)


def expm(A: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a Taylor polynomial."""
    A = np.asarray(A, dtype=float)
    k = max(0, int(math.ceil(math.log2(max(np.abs(A).sum(), 1e-16)))) + 4)
    B = A / 2**k
    out, term = np.eye(len(A)), np.eye(len(A))
    for m in range(1, 20):
        term = term @ B / m
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


@pytest.fixture(scope="module")
def g2_basis():
    return stabilizer_algebra([PHI_STD]).basis


def random_g2_element(basis, rng) -> np.ndarray:
    A = sum(float(c) * la.float_array(B) for c, B in zip(rng.standard_normal(len(basis)), basis))
    return expm(A)


# -- examples -------------------------------------------------------------------

def test_standard_phi():
    s = standard_phi()
    assert len(s.phi.terms) == 7
    assert all(abs(c) == 1 for _, c in s.phi)
    assert inner(s.phi, s.phi) == 7
    assert stabilizer_algebra([s.phi]).dim == 14
    assert s.certificate_holds()


def test_is_g2_examples():
    chk = is_g2(PHI_STD)
    assert chk.is_g2 and chk.stabilizer_dim == 14 and chk.orientation == 1
    assert la.array_is_zero(chk.adapted_frame - la.eye(7, True))
    zero = is_g2(Multivector(7, 3))
    assert not zero.is_g2 and zero.stabilizer_dim == 21
    # a decomposable 3-form is fixed by so(3) + so(4), dimension 3 + 6
    e123 = is_g2(e(7, "e123"))
    assert not e123.is_g2 and e123.stabilizer_dim == 9
    assert not is_g2(e(6, "e123")).is_g2


def test_is_g2_opposite_orientation():
    chk = is_g2(-PHI_STD)
    assert chk.is_g2 and chk.orientation == -1
    assert (-PHI_STD).pullback(chk.adapted_frame) == PHI_STD


def test_reduce_along_examples():
    red = reduce_along(PHI_STD, frame_vector(7, 1))
    assert red.omega == e(7, "e23 + e45 + e67")
    assert red.psi == e(7, "e246 - e257 - e347 - e356")
    assert red.su3().omega == OMEGA_STD and red.su3().psi == PSI_STD
    assert reduce_along(PHI_STD, frame_vector(7, 2)).su3().is_valid()
    xi = np.array([1, 1, 0, 0, 0, 0, 0]) / math.sqrt(2)
    assert reduce_along(PHI_STD.to_float(), xi).su3().is_valid(1e-9)
    with pytest.raises(ValueError):
        reduce_along(PHI_STD, 2 * frame_vector(7, 1))


def test_extend_su3_examples():
    assert extend_su3(OMEGA_STD, PSI_STD, frame_vector(7, 1)).phi == PHI_STD
    with pytest.raises(ValueError):
        extend_su3(OMEGA_STD, 2 * PSI_STD, frame_vector(7, 1))


def test_calibrated_reduce_examples(g2_basis):
    cr = calibrated_reduce(PHI_STD, [frame_vector(7, i) for i in (1, 2, 3)])
    assert [b for b in cr.betas] == list(BETA_STD)
    assert all(cr.checks.values())
    assert BETA_STD[0] == e(4, "e12 + e34")
    with pytest.raises(ValueError):
        calibrated_reduce(PHI_STD, [frame_vector(7, i) for i in (1, 2, 4)])
    g = random_g2_element(g2_basis, np.random.default_rng(2))
    plane = [g @ la.float_array(frame_vector(7, i)) for i in (1, 2, 3)]
    cr = calibrated_reduce(PHI_STD.to_float(), plane, 1e-9)
    assert all(cr.checks.values())


def test_phicom_examples():
    F, g2 = phicom_assemble(*BETA_STD)
    assert la.array_is_zero(F - la.eye(4, True))
    assert g2.phi == PHI_STD and g2.certificate_holds()
    with pytest.raises(ValueError):
        phicom_assemble(Multivector(4, 2), BETA_STD[1], BETA_STD[2])
    with pytest.raises(ValueError):
        phicom_assemble(e(4, "e12"), BETA_STD[1], BETA_STD[2])


def test_selfdual_split_examples():
    a = e(4, "e12 + e34")
    assert selfdual_split(a) == (a, Multivector(4, 2))
    plus, minus = selfdual_split(e(4, "e12"))
    assert plus == e(4, "1/2 e12 + 1/2 e34") and minus == e(4, "1/2 e12 - 1/2 e34")
    assert selfdual_split(BETA_STD[1]) == (BETA_STD[1], Multivector(4, 2))


# -- properties -----------------------------------------------------------------

def test_phi_x_constant_all_directions():
    assert abs(PHI_X_CONSTANT) == 3
    for i in range(1, 8):
        lhs, rhs = phi_x_action(frame_vector(7, i))
        assert lhs == PHI_X_CONSTANT * rhs


def test_phi_x_sign_fixed_at_e1():
    # measured independently: derive e1 _| phi on phi and compare with e1 _| *phi
    lhs = derive(contract(frame_vector(7, 1), PHI_STD), PHI_STD)
    rhs = contract(frame_vector(7, 1), hodge(PHI_STD))
    assert lhs == PHI_X_CONSTANT * rhs
    assert lhs != -PHI_X_CONSTANT * rhs


def test_calibrated_reduce_after_phicom_is_identity():
    _, g2 = phicom_assemble(*BETA_STD)
    cr = calibrated_reduce(g2.phi, [frame_vector(7, i) for i in (1, 2, 3)])
    assert list(cr.betas) == list(BETA_STD)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_is_g2_orthogonal_invariance(seed):
    Q = rotation(7, np.random.default_rng(seed))
    chk = is_g2(PHI_STD.to_float().pushforward(Q), 1e-9)
    assert chk.is_g2 and chk.stabilizer_dim == 14
    bad = is_g2(e(7, "e123 + e145").to_float().pushforward(Q), 1e-9)
    assert not bad.is_g2


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_reduce_extend_round_trip(seed):
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal(7)
    xi /= np.linalg.norm(xi)
    phi = PHI_STD.to_float()
    red = reduce_along(phi, xi, 1e-9)
    s = red.su3()
    assert s.is_valid(1e-9)
    assert (extend_su3(s.omega, s.psi, xi, 1e-9).phi - phi).is_zero(1e-9)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_adapted_basis_on_rotated_forms(seed):
    phi = PHI_STD.to_float().pushforward(rotation(7, np.random.default_rng(seed)))
    F, orient = adapted_basis(phi, 1e-9)
    assert orient == 1
    assert np.allclose(F.T @ F, np.eye(7), atol=1e-9)
    assert G2Structure(phi, F).certificate_holds(1e-9)


def test_g2_rotation_preserves_phi(g2_basis):
    g = random_g2_element(g2_basis, np.random.default_rng(11))
    assert (PHI_STD.to_float().pushforward(g) - PHI_STD).is_zero(1e-9)
    assert not (PHI_STD.to_float().pushforward(rotation(7, np.random.default_rng(1)))
                - PHI_STD).is_zero(1e-3)


def test_star_phi_norm():
    assert inner(hodge(PHI_STD), hodge(PHI_STD)) == 7
    assert (derive(stabilizer_algebra([PHI_STD]).basis[0], hodge(PHI_STD))).is_zero()
    assert volume(7).coef(range(1, 8)) == 1


def test_su3_from_g2_axis_is_standard():
    s = reduce_along(PHI_STD, frame_vector(7, 1)).su3()
    assert isinstance(s, SU3Structure) and s.omega == OMEGA_STD
