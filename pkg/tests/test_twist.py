import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from closed_forms_oracle import reference_covectors, reference_vectors
from conftest import signed_match
from dktwist import parse_spec
from dktwist.errors import ChainMismatch, DegenerateSector, LabelMismatch
from dktwist.linops import leg_permute, orthogonality_defect, residual
from dktwist.qparam import QParam
from dktwist.rmatrices import delta_cartan, exponent_model, qbar
from dktwist.twist import (
    BasisLabel,
    LabeledBasis,
    assemble_f,
    closed_basis,
    compose,
    crystal_basis,
    f_interval,
    inverse,
    natural_basis,
    spectral_basis,
    su_closed_basis,
    weight_partition,
)
from dktwist.verify import crystal_table

BCD = ["B1", "B2", "B3", "C2", "C3", "C4", "D2", "D3", "D4"]


def tagged(basis):
    return {lab.tag: vec for lab, vec in basis.items()}


def test_weight_partition_a1():
    part = weight_partition(parse_spec("A1"))
    assert [(tuple(map(int, w)), idx) for w, idx in part.items()] == [((2,), [0]), ((0,), [1, 2]), ((-2,), [3])]


def test_weight_partition_three_legs():
    part = weight_partition(parse_spec("A1"), 3)
    assert sorted(len(v) for v in part.values()) == [1, 1, 3, 3]


@pytest.mark.parametrize("text", BCD)
@pytest.mark.parametrize("q", [0.5, 2.0])
def test_zero_weight_matches_reference_vectors(text, q):
    spec = parse_spec(text)
    ours = tagged(closed_basis(spec, q))
    for tag, vec in reference_vectors(spec.series, spec.n, q).items():
        assert signed_match(ours[tag], vec) < 1e-13, tag


@pytest.mark.parametrize("text", BCD)
def test_q1_matches_reference_covectors(text):
    spec = parse_spec(text)
    ours = tagged(closed_basis(spec, 1.0))
    reference = reference_covectors(spec.series, spec.n)
    assert set(reference) == {t for t in ours if t.startswith("n")}
    for tag, vec in reference.items():
        assert signed_match(ours[tag], vec) < 1e-14, tag


def test_d2_trace_vector_at_one():
    v = tagged(closed_basis(parse_spec("D2"), 1.0))["nTr"]
    want = np.zeros(16)
    for i, j in [(1, 4), (4, 1), (2, 3), (3, 2)]:
        want[(i - 1) * 4 + j - 1] = 0.5
    assert residual(v, want) < 1e-15


def test_c2_trace_normalization():
    # sqrt({1}{s}/({s-1}{2s})) with s = 3 normalizes the two-term sum
    q = 1.7
    br = lambda k: q ** k - q ** -k  # noqa: E731
    c = math.sqrt(br(1) * br(3) / (br(2) * br(6)))
    terms = [q ** -1, q, q ** -2, q ** 2]
    assert c * math.sqrt(sum(t * t for t in terms)) == pytest.approx(1.0, abs=1e-14)
    v = tagged(closed_basis(parse_spec("C2"), q))["nTr"]
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("q", [0.1, 0.5, 2.0, 10.0])
def test_su_pair_vectors(q):
    b = tagged(su_closed_basis(3, q))
    norm = math.sqrt(q + 1 / q)
    e = np.eye(9)
    want_p = (math.sqrt(q) * e[1] + math.sqrt(1 / q) * e[3]) / norm
    want_m = (math.sqrt(1 / q) * e[1] - math.sqrt(q) * e[3]) / norm
    assert residual(b["ij+(1,2)"], want_p) < 1e-15
    assert residual(b["ij-(1,2)"], want_m) < 1e-15


@pytest.mark.parametrize("text", ["A1", "A2", "A3", "B1", "B2", "C2", "C3", "D2", "D3"])
@pytest.mark.parametrize("q", [0.01, 0.1, 0.5, 2.0, 10.0])
def test_spectral_agrees_with_closed_forms(text, q):
    spec = parse_spec(text)
    nat = natural_basis(spec, q)
    closed = closed_basis(spec, q)
    assert nat.labels == closed.labels
    assert residual(nat.vectors, closed.vectors) <= 1e-9


def test_a_spectral_without_reference_is_complete():
    spec = parse_spec("A2")
    basis = spectral_basis([qbar(spec, 2.0)], weight_partition(spec), 2.0)
    assert basis.dim == 9
    ex = sorted({round(lab.exponents[0], 9) for lab in basis.labels})
    assert ex == pytest.approx(sorted(float(e) for e in exponent_model(spec).exponents))


def test_degenerate_sector_reported():
    spec = parse_spec("D2")
    with pytest.raises(DegenerateSector) as info:
        spectral_basis([qbar(spec, 2.0)], weight_partition(spec), 2.0)
    assert info.value.dim >= 2


def test_crystal_examples():
    a2 = tagged(crystal_basis(parse_spec("A2")))
    assert residual(a2["ij-(1,3)"], np.eye(9)[0 * 3 + 2]) == 0.0
    c2 = tagged(crystal_basis(parse_spec("C2")))
    assert c2["n-(2)"].min() == -1.0
    b1 = tagged(crystal_basis(parse_spec("B1")))
    assert residual(b1["nTr"], np.eye(9)[2]) == 0.0


@pytest.mark.parametrize("text", ["A2", "B1", "B2", "C2", "C3", "D2", "D3"])
def test_crystal_basis_is_signed_permutation(text):
    spec = parse_spec(text)
    v = crystal_basis(spec).vectors
    assert np.array_equal(np.abs(v).sum(axis=0), np.ones(v.shape[1]))
    assert set(np.unique(v)) <= {-1.0, 0.0, 1.0}
    table = crystal_table(spec)
    for tag, vec in tagged(crystal_basis(spec)).items():
        assert np.array_equal(vec, table[tag])


@pytest.mark.parametrize("text", ["A1", "A2", "A3", "C2", "C3"])
def test_closed_forms_approach_crystal(text):
    spec = parse_spec(text)
    near = tagged(closed_basis(spec, 1e-6))
    for tag, vec in tagged(crystal_basis(spec)).items():
        assert residual(near[tag], vec) <= 1e-5, tag


def test_bd_limits_documented():
    # B: sqrt(q) convergence for n+ and the trace; D: n-(0) tends to a
    # two-term vector rather than a single product vector
    b1 = tagged(closed_basis(parse_spec("B1"), 1e-6))
    cry = tagged(crystal_basis(parse_spec("B1")))
    assert 1e-4 < residual(b1["n+(1/2)"], cry["n+(1/2)"]) < 1e-2
    d2 = tagged(closed_basis(parse_spec("D2"), 1e-6))
    assert np.sort(np.abs(d2["n-(0)"]))[-2:] == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-5)


def test_a1_zero_one_block():
    f = f_interval(parse_spec("A1"), 0.0, 1.0).matrix
    r = 1 / math.sqrt(2)
    assert residual(f[1:3, 1:3], [[r, -r], [r, r]]) < 1e-15


def test_identity_on_equal_parameters():
    for q in (0.0, 1.0, 2.5):
        f = f_interval(parse_spec("B1"), q, q)
        assert residual(f.matrix, np.eye(9)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(text=st.sampled_from(["A1", "A2", "B1", "C2", "D2"]), logq=st.floats(-4.6, 4.6))
def test_f_orthogonal_and_block_diagonal(text, logq):
    spec = parse_spec(text)
    f = f_interval(spec, math.exp(logq), 1.0)
    assert orthogonality_defect(f.matrix) <= 1e-10
    for h in delta_cartan(spec):
        assert residual(f.matrix @ h, h @ f.matrix) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(text=st.sampled_from(["A2", "B1", "C2"]),
       qs=st.lists(st.sampled_from([0.0, 0.05, 0.3, 1.0, 2.0, 7.0]), min_size=3, max_size=3))
def test_composition_two_paths(text, qs):
    spec = parse_spec(text)
    q, mid, q2 = qs
    path = compose(f_interval(spec, q2, mid), f_interval(spec, mid, q))
    assert residual(path.matrix, f_interval(spec, q2, q).matrix) <= 1e-10


def test_composition_spec_example():
    spec = parse_spec("A1")
    lhs = compose(f_interval(spec, 3.0, 0.0), f_interval(spec, 0.0, 1.0))
    assert residual(lhs.matrix, f_interval(spec, 3.0, 1.0).matrix) <= 1e-12
    back = compose(f_interval(spec, 1.0, 3.0), f_interval(spec, 3.0, 1.0))
    assert residual(back.matrix, np.eye(4)) <= 1e-12


def test_inverse_and_chain_errors():
    spec = parse_spec("A1")
    f = f_interval(spec, 2.0, 1.0)
    g = inverse(f)
    assert g.q_from == QParam(2.0) and g.q_to == QParam(1.0)
    with pytest.raises(ChainMismatch):
        compose(f, f)
    with pytest.raises(ChainMismatch):
        compose(f_interval(parse_spec("A2"), 1.0, 2.0), f)


@settings(max_examples=15, deadline=None)
@given(text=st.sampled_from(["A1", "A2", "B1", "C2", "D2"]), logq=st.floats(-3, 3))
def test_leg_swap(text, logq):
    spec = parse_spec(text)
    q = math.exp(logq)
    f = f_interval(spec, q, 1.0).matrix
    fi = f_interval(spec, 1 / q, 1.0).matrix
    assert residual(fi, leg_permute(f, (spec.n, spec.n), (1, 0))) <= 1e-10


@pytest.mark.parametrize("text", ["A1", "A2", "B1", "C2", "D2"])
def test_conjugation_by_zero_one_diagonalizes_tau(text):
    spec = parse_spec(text)
    f = f_interval(spec, 0.0, 1.0).matrix
    m = f @ exponent_model(spec).tau() @ f.T
    assert residual(m, np.diag(np.diag(m))) <= 1e-10


def test_labeled_basis_validation():
    lab = [BasisLabel((), (0.0,), "a", 0), BasisLabel((), (1.0,), "b", 1)]
    with pytest.raises(Exception):
        LabeledBasis(QParam(1.0), tuple(lab), np.array([[1.0, 1.0], [0.0, 1.0]]))
    basis = LabeledBasis(QParam(1.0), tuple(lab), np.eye(2))
    other = LabeledBasis(QParam(2.0), (lab[0], BasisLabel((), (2.0,), "c", 1)), np.eye(2))
    with pytest.raises(LabelMismatch):
        assemble_f(basis, other, parse_spec("A1"))


def test_label_string():
    lab = natural_basis(parse_spec("A1"), 2.0).labels[1]
    assert str(lab) == "ij+(1,2) w=(0) l=1"
