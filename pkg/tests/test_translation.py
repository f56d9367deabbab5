"""Twisted polynomial algebra, translation algebra, comparisons and mu_3 predictions."""
from __future__ import annotations

import pytest
from conftest import complex_, dynkin, fragment, gauged, quiver, retraction, table

from ginzburg_ainf.ar_mesh import NotDynkinError, knit, projective_classes
from ginzburg_ainf.transfer import check_ainf_relations
from ginzburg_ainf.translation import (
    NotARecognizedTriangleError,
    build_twisted,
    build_U,
    compare_bigraded,
    happel_prediction,
    mu3_prediction,
    recognized_triangles,
    homology_comparison,
    twisted_comparison,
    u_equivariance_violations,
    u_generator_labels,
)

DYNKIN = ["A2", "A3", "D4"]

# path-order triples with their predicted (source, target, weight, degree) blocks
A3_TRIPLES = {
    ("a.b", "b*", "b"): ("3", "1", 1, 1),
    ("b", "b*.a*", "a"): ("2", "2", 2, 1),
    ("b*", "b", "b*.a*"): ("1", "3", 3, 1),
}


def test_twisted_a3_presentation():
    tw = build_twisted(quiver("A3"), 4)
    arrows = tw.quiver.arrows
    u_arrows = [a for a in arrows if a.degree == 1]
    assert len(arrows) - len(u_arrows) == 4 and len(u_arrows) == 3
    assert len(tw.relators) == 4 + 3
    for a in u_arrows:
        i = a.target
        assert a.source == tw.dynkin.nu[i] and a.weight == tw.dynkin.N[i]


def test_twisted_a2_u_arrows_cross():
    tw = build_twisted(quiver("A2"), 3)
    assert sorted((a.source, a.target) for a in tw.quiver.arrows if a.degree == 1) == [("1", "2"), ("2", "1")]


@pytest.mark.parametrize("name", DYNKIN)
def test_twisted_relators_homogeneous(name):
    tw = build_twisted(quiver(name), 3)
    arrows = {a.id: a for a in tw.quiver.arrows}
    for rel in tw.relators:
        bideg = {(sum(arrows[x].weight for x in p.arrows), sum(arrows[x].degree for x in p.arrows)) for p in rel}
        assert len(bideg) == 1


@pytest.mark.parametrize("name", DYNKIN)
def test_weight_zero_degree_zero_is_path_algebra(name):
    q = quiver(name)
    proj = projective_classes(q)
    idx = {v: n for n, v in enumerate(q.vertices)}
    want = {(i, j): proj[i][idx[j]] for i in q.vertices for j in q.vertices}
    for alg in (build_twisted(q, 2), build_U(q, 2)):
        dims = alg.block_dims()
        got = {(i, j): dims.get((i, j, 0, 0), 0) for i in q.vertices for j in q.vertices}
        assert got == want


def test_twisted_rejects_non_dynkin():
    with pytest.raises(NotDynkinError):
        build_twisted(quiver("K2"), 3)


def test_u_of_a2_has_s_classes():
    u = build_U(quiver("A2"), 3)
    d = dynkin("A2")
    for i in d.nu:
        assert u.block_dims().get((d.nu[i], i, d.N[i], 1)) == 1


@pytest.mark.parametrize("name", ["K2", "K3"])
def test_u_of_kronecker_is_knitting(name):
    q, w = quiver(name), 4
    u = build_U(q, w)
    frag = knit(q, w)
    idx = {v: n for n, v in enumerate(q.vertices)}
    for (i, j, n, d), dim in u.block_dims().items():
        assert d == 0
        assert dim == frag.object(i, n).klass[idx[j]]


@pytest.mark.parametrize("name", DYNKIN)
def test_u_matches_happel(name):
    u = build_U(quiver(name), 4)
    assert happel_prediction(u) == u.block_dims()


def test_u_product_associative_on_samples():
    u = build_U(quiver("A3"), 4)
    words = [p for b in u.block_dims() for p in u.basis(b)]
    checked = 0
    for x in words:
        for y in words:
            if x.target != y.source:
                continue
            for z in words:
                if y.target != z.source:
                    continue
                xy = u.multiply({x: 1}, {y: 1})
                yz = u.multiply({y: 1}, {z: 1})
                assert u.multiply(xy, {z: 1}) == u.multiply({x: 1}, yz)
                checked += 1
    assert checked > 50


@pytest.mark.parametrize("name", DYNKIN)
def test_twisted_zero_mismatches(name):
    rep, _, _ = twisted_comparison(quiver(name), 4)
    assert rep.ok and rep.blocks_checked > 0
    assert rep.constructive["relators_checked"] == len(build_twisted(quiver(name), 1).relators)


@pytest.mark.parametrize("name", DYNKIN + ["K2"])
def test_homology_zero_mismatches(name):
    rep, _, _ = homology_comparison(complex_(name), retraction(name), 4)
    assert rep.ok and rep.blocks_checked > 0
    assert rep.constructive["scalars_found"]


def test_compare_flags_truncation_boundary():
    q = quiver("A3")
    rep = compare_bigraded(build_twisted(q, 4), build_U(q, 3), 4, constructive=False)
    assert not rep.ok
    assert {m["block"][2] for m in rep.mismatches} == {4}
    assert all(m["a"] > m["b"] for m in rep.mismatches)
    assert set(rep.to_json()) >= {"blocks_checked", "mismatches", "hilbert_a", "hilbert_b"}


@pytest.mark.parametrize("triple,block", sorted(A3_TRIPLES.items()))
def test_a3_example_triples(triple, block):
    _, g = gauged("A3")
    pred = mu3_prediction(triple, g, dynkin("A3"), fragment("A3"))
    assert pred.block == block and pred.generator is not None
    value = g.get(triple)
    assert set(value) == {pred.generator} and value[pred.generator] in (1, -1)
    # nonvanishing holds before the gauge as well
    raw = table("A3").get(triple)
    assert raw and raw.get(pred.generator)


def test_split_configuration_rejected():
    t = table("A3")
    with pytest.raises(NotARecognizedTriangleError, match="split"):
        mu3_prediction(("b*", "b.b*", "a*"), t, dynkin("A3"), fragment("A3"))


@pytest.mark.parametrize("triple,msg", [
    (("b*", "b", "b*"), "X\\[1\\]"),
    (("b", "b*", "b.b*"), "vanish"),
    (("a", "b", "zz"), "unknown"),
    (("b", "a", "b"), "composable"),
])
def test_other_rejections(triple, msg):
    with pytest.raises(NotARecognizedTriangleError, match=msg):
        mu3_prediction(triple, table("A3"), dynkin("A3"), fragment("A3"))


def test_a3_recognized_triangles():
    _, g = gauged("A3")
    tri = recognized_triangles(g, dynkin("A3"), fragment("A3"))
    assert set(A3_TRIPLES) <= set(tri) and len(tri) == 6
    for xs, pred in tri.items():
        assert set(g.get(xs)) == {pred.generator}


def test_d4_triangles_nonzero():
    _, g = gauged("D4")
    tri = recognized_triangles(g, dynkin("D4"), fragment("D4"))
    assert len(tri) == 15
    for xs, pred in tri.items():
        v = g.get(xs)
        assert pred.generator in v and v[pred.generator] != 0


@pytest.mark.parametrize("name,f2_size", [("A2", 0), ("A3", 2), ("D4", 0)])
def test_u_equivariance_after_gauge(name, f2_size):
    f2, g = gauged(name)
    assert len(f2) == f2_size
    labels = u_generator_labels(g, dynkin(name)).values()
    count, bad = u_equivariance_violations(g, labels)
    assert count > 0 and bad == []
    assert check_ainf_relations(g, None, 6).violations == []


def test_raw_a3_table_is_not_u_equivariant():
    t = table("A3")
    _, bad = u_equivariance_violations(t, u_generator_labels(t, dynkin("A3")).values())
    assert bad


def test_a3_mu4_survives_the_gauge():
    xs = ("a.b", "b*.a*", "a.b", "b*.a*")
    raw, (_, g) = table("A3"), gauged("A3")
    for t in (raw, g):
        v = t.get(xs)
        assert v and all(t.classes[k].block == ("3", "3", 4, 2) for k in v)
