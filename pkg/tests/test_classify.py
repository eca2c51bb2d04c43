from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from g2torsion import _linalg as la
from g2torsion.classify import OUTSIDE, branch_d1, classify, classify6, golden_table
from g2torsion.exterior import Multivector
from g2torsion.g2 import PHI_STD
from g2torsion.linrep import (LieSubalgebra, commutator, lie_closure, skew_coords,
                              stabilizer_algebra)
from g2torsion.zoo import (CASES, PointModel, build_3ad_sasaki, build_alpha_sasaki7,
                           build_case, build_nearly_parallel, build_r2_sasaki5,
                           build_space_form_hk, su3_model, to_dim6)

from oracles import random_form

VOL_V = Multivector.basis(7, (1, 2, 3))
OVERLAPS = ({"5a", "5b"}, {"2", "3a"}, {"2", "4a"})


def centralizer(alg: LieSubalgebra, sub: LieSubalgebra) -> list[np.ndarray]:
    rows = []
    for S in sub.basis:
        cols = [skew_coords(commutator(B, S)) for B in alg.basis]
        rows.extend(np.array(cols, dtype=object).T)
    out = []
    for c in la.nullspace(np.array(rows, dtype=object)):
        M = la.zeros((7, 7), True)
        for k, B in enumerate(alg.basis):
            M = M + c[k] * B
        out.append(M)
    return out


def test_golden_table():
    rows = golden_table()
    assert all(r["ok"] for r in rows), [r for r in rows if not r["ok"]]
    for r in rows:
        if len(r["labels"]) > 1:
            assert set(r["labels"]) in OVERLAPS


def test_reference_examples():
    assert classify(build_3ad_sasaki(1, 2)).labels == ["4c"]
    rep = classify(build_nearly_parallel(1))
    assert rep.labels == ["5b"] and rep.evidence["lambda"] == 1
    assert set(classify(build_space_form_hk(0)).labels) == {"4a", "2"}
    assert classify(build_alpha_sasaki7(1)).labels == ["3c"]


def test_overlap_nearly_parallel_3ad():
    rep = classify(build_3ad_sasaki(1, 5))
    assert set(rep.labels) == {"5a", "5b"}


def test_report_fields():
    rep = classify(build_case("3c"))
    assert rep.d == 1 and rep.split.dims == (1, 6)
    assert rep.branch_trace[0][0] == "hol preserves phi and tau"
    d = rep.to_dict()
    assert d["labels"] == ["3c"] and d["verdict"] == "3c"
    assert any(t[0] == "nabla^tau R^tau = 0 test" for t in d["branch_trace"])


def test_branch_d1_evidence():
    rep = classify(build_case("3b"))
    assert rep.evidence["alpha"] == 0 and rep.evidence["sigma_a"] != 0
    rep = classify(build_case("3d"))
    assert rep.evidence["a_plus_2b"] == 0
    rep = classify(build_case("3e", a=1, b=1))
    assert rep.evidence["a"] != 0
    assert ("sigma = 0", True, "") in rep.branch_trace


def test_branch_d1_direct_call():
    m = build_case("3c")
    hol = lie_closure(m.hol_generators)
    rep = classify(m)
    assert branch_d1(m, la.eye(7, True)[:, 0], hol, rep, exact=True) == ["3c"]


def test_random_torsion_is_outside():
    rng = np.random.default_rng(4)
    for _ in range(5):
        tau = random_form(7, 3, rng)
        upper = PointModel(7, PHI_STD, tau, [], {}, "")
        rep = classify(upper)
        assert rep.labels == [] and rep.verdict == OUTSIDE
        g2 = build_nearly_parallel(1).hol_generators
        rep = classify(PointModel(7, PHI_STD, tau, g2, {}, ""))
        assert rep.verdict == OUTSIDE


def test_upper_bound_caveat():
    m = build_case("4c")
    bare = PointModel(7, m.phi, m.tau, [], {}, "")
    rep = classify(bare)
    assert any("upper-bound holonomy" in c for c in rep.caveats)
    assert "4c" in rep.labels
    assert not classify(m).caveats


def test_case_one_fingerprint():
    su2_su2c = stabilizer_algebra([PHI_STD, VOL_V])
    sp1 = stabilizer_algebra([PHI_STD, Multivector.basis(7, (1,)), Multivector.basis(7, (2,))])
    su2c = centralizer(su2_su2c, sp1)
    assert len(su2c) == 3
    tau = VOL_V + PHI_STD
    rep = classify(PointModel(7, PHI_STD, tau, su2c, {}, ""))
    assert rep.labels == ["1"] and rep.evidence["holonomy"] == "su2_c"
    assert rep.caveats
    rep = classify(PointModel(7, PHI_STD, tau, su2c + [sp1.basis[0]], {}, ""))
    assert rep.evidence["holonomy"] == "u1_plus_su2c" and rep.labels == ["1"]


def test_3ad_with_zero_alpha_and_broken_shape_are_outside():
    hol = build_case("5a").hol_generators
    assert classify(PointModel(7, PHI_STD, VOL_V, hol, {}, "")).verdict == OUTSIDE
    m = build_case("4c")
    tau = m.tau + Fraction(1, 10) * Multivector.basis(7, (4, 5, 6))
    assert classify(PointModel(7, PHI_STD, tau, m.hol_generators, {}, "")).verdict == OUTSIDE


def test_classify_rejects_six_dimensional_input():
    with pytest.raises(ValueError):
        classify(su3_model("cy"))
    with pytest.raises(ValueError):
        classify6(build_case("3c"))


def test_classify6_examples():
    assert classify6(su3_model("nk")).labels == ["su3-3"]
    assert classify6(su3_model("cy")).labels == ["su3-2"]
    assert classify6(to_dim6(build_r2_sasaki5(1), 3)).labels == ["su3-4"]
    rep = classify6(su3_model("nk", x=0, y=1))
    assert rep.labels == ["su3-3"] and rep.evidence["labels7"] == ["3b"]


def test_classify6_random_sigma_is_outside():
    m = su3_model("nk")
    m.tau = random_form(6, 3, np.random.default_rng(2))
    assert classify6(m).verdict == OUTSIDE


@pytest.mark.parametrize("label", sorted(CASES))
def test_frame_equivariance(label):
    m = build_case(label)
    want = classify(m).labels
    rng = np.random.default_rng(sorted(CASES).index(label))
    for _ in range(20):
        Q = la.random_rotation(7, rng)
        assert classify(m.transform(Q), 1e-9).labels == want
