from __future__ import annotations

import itertools
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from g2torsion import _linalg as la
from g2torsion.exterior import Multivector, derive, form_to_endo, frame_vector, volume
from g2torsion.g2 import PHI_STD
from g2torsion.linrep import (LieSubalgebra, annihilated_vectors, commutator, conjugate,
                              from_skew_coords, identify_algebra, invariant_decomposition,
                              lie_closure, skew_basis, skew_coords, stabilizer_algebra,
                              standard_split)
from g2torsion.su3 import OMEGA_STD, PSI_STD

from oracles import rotation

E1 = Multivector.basis(7, (1,))
E2 = Multivector.basis(7, (2,))


def stab(*forms):
    return stabilizer_algebra(list(forms))


@pytest.fixture(scope="module")
def g2():
    return stab(PHI_STD)


@pytest.fixture(scope="module")
def lam_minus_h():
    # fixes e1, e2 and hence e3 = phi(e1, e2, .): acts on e4..e7 only
    return stab(PHI_STD, E1, E2)


@pytest.fixture(scope="module")
def su2_su2c():
    return stab(PHI_STD, Multivector.basis(7, (1, 2, 3)))


def centralizer(alg: LieSubalgebra, sub: LieSubalgebra) -> LieSubalgebra:
    """Elements of alg commuting with every element of sub."""
    rows = []
    for S in sub.basis:
        cols = [skew_coords(commutator(B, S)) for B in alg.basis]
        rows.extend(np.array(cols, dtype=object).T)
    null = la.nullspace(np.array(rows, dtype=object))
    mats = []
    for c in null:
        M = la.zeros((alg.n, alg.n), True)
        for k, B in enumerate(alg.basis):
            M = M + c[k] * B
        mats.append(M)
    return LieSubalgebra(alg.n, mats)


def harmonic_cubic_so3() -> LieSubalgebra:
    """so(3) on harmonic cubic polynomials in 3 variables: the 7-dim irreducible real rep.

    Skew with respect to the Fischer product <x^a, x^b> = a! delta_ab.
    """
    monos = [m for m in itertools.product(range(4), repeat=3) if sum(m) == 3]
    idx = {m: i for i, m in enumerate(monos)}
    weight = np.array([float(factorial(a) * factorial(b) * factorial(c)) for a, b, c in monos])

    def lap(m):
        out = {}
        for k in range(3):
            if m[k] >= 2:
                t = list(m)
                t[k] -= 2
                out[tuple(t)] = out.get(tuple(t), 0) + m[k] * (m[k] - 1)
        return out

    lin = [m for m in itertools.product(range(2), repeat=3) if sum(m) == 1]
    L = np.zeros((3, len(monos)))
    for j, m in enumerate(monos):
        for t, c in lap(m).items():
            L[lin.index(t), j] += c
    # kernel of the Laplacian, orthonormal for the Fischer product
    _, s, vt = np.linalg.svd(L)
    ker = vt[np.sum(s > 1e-12):].T
    W = np.diag(weight)
    G = ker.T @ W @ ker
    ker = ker @ np.linalg.inv(np.linalg.cholesky(G)).T

    def gen(i, j):
        # x_i d/dx_j - x_j d/dx_i on monomials
        M = np.zeros((len(monos), len(monos)))
        for col, m in enumerate(monos):
            for a, b, sgn in ((i, j, 1), (j, i, -1)):
                if m[b] > 0:
                    t = list(m)
                    t[b] -= 1
                    t[a] += 1
                    M[idx[tuple(t)], col] += sgn * m[b]
        return M

    mats = []
    for i, j in ((0, 1), (1, 2), (0, 2)):
        A = gen(i, j) @ ker
        mats.append(ker.T @ W @ A)
    return lie_closure(mats, 7, 1e-9)


# -- examples -------------------------------------------------------------------

def test_closure_single_generator_is_abelian():
    A = form_to_endo(Multivector.basis(4, (1, 2)))
    alg = lie_closure([A])
    assert alg.dim == 1 and alg.center_dim() == 1 and alg.derived_dim() == 0


def test_closure_two_generators_give_so3():
    gens = [form_to_endo(Multivector.basis(3, I)) for I in ((1, 2), (1, 3))]
    assert lie_closure(gens).dim == 3


def test_closure_of_two_random_g2_elements_is_g2(g2):
    rng = np.random.default_rng(5)
    gens = []
    for _ in range(2):
        c = rng.integers(-3, 4, g2.dim)
        M = la.zeros((7, 7), True)
        for k, B in enumerate(g2.basis):
            M = M + int(c[k]) * B
        gens.append(M)
    alg = lie_closure(gens)
    assert alg.dim == 14
    assert alg.is_subalgebra_of(g2)


def test_stabilizer_dimensions(g2):
    assert g2.dim == 14
    assert stab(OMEGA_STD, PSI_STD).dim == 8
    for n in (4, 5, 7):
        assert stab(volume(n)).dim == n * (n - 1) // 2


def test_annihilated_vectors_examples(g2, lam_minus_h):
    su3 = stab(PHI_STD, E1)
    vecs = annihilated_vectors(su3)
    assert len(vecs) == 1
    assert la.rank(np.array([vecs[0], frame_vector(7, 1)], dtype=object)) == 1
    so7 = LieSubalgebra(7, skew_basis(7))
    assert annihilated_vectors(so7) == []
    vecs = annihilated_vectors(lam_minus_h)
    assert len(vecs) == 3
    assert all(v[3:].tolist() == [0, 0, 0, 0] for v in vecs)
    assert annihilated_vectors(g2) == []


def test_invariant_decomposition_examples(su2_su2c):
    su3_6 = stab(OMEGA_STD, PSI_STD)
    assert [b.dim for b in invariant_decomposition(su3_6)] == [6]
    line = lie_closure([form_to_endo(Multivector.basis(4, (1, 2)))])
    assert sorted(b.dim for b in invariant_decomposition(line)) == [1, 1, 2]
    assert [b.dim for b in invariant_decomposition(su2_su2c)] == [3, 4]


def test_standard_split_examples(g2):
    u1_su2 = stab(PHI_STD, E1, Multivector.basis(7, (2, 3)))
    assert standard_split(u1_su2).dims == (3, 4)
    zero = LieSubalgebra(7, [])
    assert standard_split(zero).dims == (7, 0)
    assert standard_split(g2).dims == (0, 7)


def test_identify_examples(g2, lam_minus_h, su2_su2c):
    assert identify_algebra(g2) == "g2"
    assert identify_algebra(su2_su2c) == "su2_plus_su2c"
    assert identify_algebra(LieSubalgebra(7, [])) == "other"
    assert identify_algebra(stab(PHI_STD, E1)) == "su3"
    su2c = centralizer(su2_su2c, lam_minus_h)
    assert su2c.dim == 3
    assert identify_algebra(su2c) == "su2_c"
    # add one u(1) element of the commuting factor
    u1 = lie_closure(su2c.basis + [lam_minus_h.basis[0]])
    assert identify_algebra(u1) == "u1_plus_su2c"


def test_identify_irreducible_so3():
    alg = harmonic_cubic_so3()
    assert alg.dim == 3
    assert [b.dim for b in invariant_decomposition(alg)] == [7]
    assert identify_algebra(alg) == "so3_irr"


def test_skew_coords_round_trip():
    rng = np.random.default_rng(0)
    c = [la.rational(int(x)) for x in rng.integers(-4, 5, 21)]
    A = from_skew_coords(7, c)
    assert la.array_is_zero(A + A.T)
    assert list(skew_coords(A)) == c


def test_rejects_non_skew_and_non_closed():
    with pytest.raises(ValueError):
        LieSubalgebra(3, [la.eye(3, True)])
    gens = [form_to_endo(Multivector.basis(3, I)) for I in ((1, 2), (1, 3))]
    with pytest.raises(ValueError):
        LieSubalgebra(3, gens)


# -- properties -----------------------------------------------------------------

def test_stabilizer_output_is_closed_and_stabilizes(g2, su2_su2c, lam_minus_h):
    for alg, forms in ((g2, [PHI_STD]), (su2_su2c, [PHI_STD]), (lam_minus_h, [PHI_STD, E1])):
        assert alg.is_closed()
        assert all(derive(A, f).is_zero() for A in alg.basis for f in forms)


def test_blocks_invariant_and_orthogonal(su2_su2c, lam_minus_h):
    for alg in (su2_su2c, lam_minus_h, stab(PHI_STD, E1)):
        blocks = invariant_decomposition(alg)
        assert sum(b.dim for b in blocks) == 7
        for b in blocks:
            assert b.is_invariant(alg)
        for b, c in itertools.combinations(blocks, 2):
            assert la.array_is_zero(b.projector @ c.projector)
        split = standard_split(alg)
        assert la.array_is_zero(split.vertical.projector @ split.horizontal.projector)


_CONJ_CASES = [stab(PHI_STD), stab(PHI_STD, Multivector.basis(7, (1, 2, 3))), stab(PHI_STD, E1)]
_CONJ_NAMES = [identify_algebra(a) for a in _CONJ_CASES]


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_identify_is_conjugation_invariant(seed):
    Q = rotation(7, np.random.default_rng(seed))
    for alg, name in zip(_CONJ_CASES, _CONJ_NAMES):
        assert identify_algebra(conjugate(alg.to_float(), Q)) == name
