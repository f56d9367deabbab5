"""Knitting, Nakayama data and mesh categories."""
from __future__ import annotations

import pytest
from conftest import dynkin, fragment, quiver

from ginzburg_ainf.ar_mesh import (
    KnittingDivergenceError,
    NotDynkinError,
    OutOfFragmentError,
    RepetitiveVertex,
    happel_hom_dim,
    knit,
    mesh_hom,
    mesh_hom_table,
    nakayama_and_N,
    projective_classes,
    sigma,
)
from ginzburg_ainf.quiver import QuiverError, parse_quiver


def classes(frag, power):
    return {o.vertex: (o.klass, o.shift) for o in frag.objects.values() if o.power == power}


def test_a2_first_levels():
    f = knit(quiver("A2"), 2)
    assert classes(f, 0) == {"1": ((1, 0), 0), "2": ((1, 1), 0)}
    assert classes(f, 1)["1"] == ((0, 1), 0)
    # next knit recognizes P1[1] and P2[1]
    assert classes(f, 1)["2"] == ((-1, 0), 1)
    assert classes(f, 2)["1"] == ((-1, -1), 1)


def test_a2_fragment_fixture():
    f = knit(quiver("A2"), 4)
    got = [(o.position.id(), o.klass, o.shift) for o in sorted(f.objects.values(), key=lambda o: (o.power, o.vertex))]
    assert got == [
        ("1@0", (1, 0), 0), ("2@0", (1, 1), 0), ("1@-1", (0, 1), 0), ("2@-1", (-1, 0), 1),
        ("1@-2", (-1, -1), 1), ("2@-2", (0, -1), 1), ("1@-3", (1, 0), 2), ("2@-3", (1, 1), 2),
        ("1@-4", (0, 1), 2), ("2@-4", (-1, 0), 3),
    ]


@pytest.mark.parametrize("name,count", [("A2", 3), ("A3", 6), ("D4", 12), ("A4", 10)])
def test_unshifted_counts(name, count):
    # number of indecomposables = number of positive roots
    assert len(fragment(name).unshifted()) == count


def test_nakayama_data():
    a2, a3, d4 = dynkin("A2"), dynkin("A3"), dynkin("D4")
    assert (a2.nu, a2.N, a2.coxeter) == ({"1": "2", "2": "1"}, {"1": 1, "2": 2}, 3)
    assert a3.nu == {"1": "3", "2": "2", "3": "1"} and a3.N == {"1": 1, "2": 2, "3": 3}
    assert d4.nu == {v: v for v in "1234"} and set(d4.N.values()) == {3}


@pytest.mark.parametrize("name", ["A2", "A3", "D4", "A4"])
def test_nakayama_involution_and_shift_sum(name):
    d = dynkin(name)
    for i in d.nu:
        assert d.nu[d.nu[i]] == i and d.nu_inverse(i) == d.nu[i]
        assert d.N[i] + d.N[d.nu[i]] == d.coxeter


@pytest.mark.parametrize("name", ["A2", "A3", "D4"])
def test_first_shifted_is_nu_projective(name):
    d, f = dynkin(name), fragment(name)
    proj = projective_classes(quiver(name))
    for i, obj in f.first_shifted().items():
        assert obj.power == d.N[d.nu[i]]
        assert obj.klass == tuple(-x for x in proj[d.nu[i]])


def test_kronecker_grows_without_shift():
    f = knit(quiver("K2"), 6)
    assert not f.first_shifted()
    seq = [classes(f, k)[v][0] for k in range(7) for v in ("2", "1")]
    assert seq[:4] == [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert all(sum(b) > sum(a) for a, b in zip(seq, seq[1:]))


@pytest.mark.parametrize("name", ["A2", "A3", "D4", "K2", "K3"])
def test_mesh_additivity(name):
    assert knit(quiver(name), 5).mesh_additivity_holds()


@pytest.mark.parametrize("name", ["A3", "D4"])
def test_tau_periodicity(name):
    # tau^{-h} = [2] on the Dynkin derived category
    d = dynkin(name)
    f = knit(quiver(name), d.coxeter + 1)
    for i in d.nu:
        assert f.object(i, d.coxeter).klass == f.object(i, 0).klass
        assert f.object(i, d.coxeter).shift == 2


def test_sigma_maps_arrow_to_translate():
    assert sigma(quiver("A2"), "a@-1") == "a*@-1"
    assert sigma(quiver("A2"), "a*@-2") == "a@-1"


def test_mesh_hom_identity_is_one_dimensional():
    f = fragment("A3")
    for v in "123":
        h = mesh_hom(f, RepetitiveVertex(v, -2), RepetitiveVertex(v, -2))
        assert h.dim == 1 and h.predicted == 1


def test_mesh_hom_a2():
    f = knit(quiver("A2"), 4)
    # Hom(P2, tau^- P1) = Hom(P2, S2) is one dimensional
    h = mesh_hom(f, RepetitiveVertex("1", -1), RepetitiveVertex("2", 0))
    assert (h.dim, h.predicted) == (1, 1)
    # Hom(P1, tau^- P1) = Hom(P1, S2) vanishes
    h = mesh_hom(f, RepetitiveVertex("1", -1), RepetitiveVertex("1", 0))
    assert (h.dim, h.predicted) == (0, 0)


@pytest.mark.parametrize("name,w", [("A2", 3), ("A3", 4), ("D4", 4), ("K2", 3)])
def test_mesh_category_matches_happel(name, w):
    f = knit(quiver(name), w)
    table = mesh_hom_table(f, w)
    assert table and all(dim == pred for dim, pred in table.values())


def test_happel_zero_on_shifted():
    f = knit(quiver("A2"), 3)
    assert happel_hom_dim(f, "1", "2", 1) == 0
    assert happel_hom_dim(f, "2", "1", 1) == 1


def test_errors():
    with pytest.raises(NotDynkinError):
        nakayama_and_N(quiver("K2"))
    with pytest.raises(QuiverError):
        knit(quiver("A2"), 0)
    with pytest.raises(KnittingDivergenceError):
        knit(quiver("K2"), 10_000)
    with pytest.raises(QuiverError):
        knit(parse_quiver("vertex 1\narrow l: 1 -> 1\n"), 2)
    with pytest.raises(OutOfFragmentError):
        mesh_hom(knit(quiver("A2"), 2), RepetitiveVertex("1", -5), RepetitiveVertex("1", 0))
    with pytest.raises(OutOfFragmentError):
        knit(quiver("A2"), 2).object("1", 3)


def test_json_and_dot():
    f = knit(quiver("A2"), 2)
    js = f.to_json()
    assert js["depth"] == 2 and len(js["objects"]) == 6
    assert f.to_dot().startswith("digraph ar {")
