import itertools
from fractions import Fraction

import pytest

from polytope_ml.data.formats import (
    DataFormatError,
    parse_polytopes,
    read_features,
    read_polytopes_with_meta,
    read_table,
    write_features,
    write_polytopes,
    write_table,
)
from polytope_ml.data.generate import (
    EquivalenceIndex,
    GenerationStarvedError,
    enumerate_reflexive_polygons,
    generate_canonical_fano_3d,
    generate_fano_polygons,
)
from polytope_ml.data.records import augment, compute_labels, label, label_tuple, with_variants
from polytope_ml.polytope import (
    LatticePolytope,
    dual_polytope,
    gorenstein_index,
    is_canonical_fano,
    is_fano,
    is_reflexive,
    is_unimodular_equivalent,
    normalized_volume,
    transform,
    vertices_generate_lattice,
)


def test_polygon_generator_contract():
    polys = generate_fano_polygons(30, seed=1, max_gorenstein=10)
    for P in polys:
        assert is_fano(P) and vertices_generate_lattice(P)
        assert gorenstein_index(P) <= 10
        assert max(abs(x) for v in P.vertices for x in v) <= 5
    for P, Q in itertools.combinations(polys, 2):
        assert is_unimodular_equivalent(P, Q) is None


def test_generators_are_deterministic():
    assert generate_fano_polygons(10, seed=4) == generate_fano_polygons(10, seed=4)
    assert generate_canonical_fano_3d(5, seed=4) == generate_canonical_fano_3d(5, seed=4)


def test_vertex_count_stratification():
    polys = generate_fano_polygons(10, seed=2, n_vertices=5)
    assert all(P.n_vertices == 5 for P in polys)


def test_3d_generator_classes():
    refl = generate_canonical_fano_3d(8, seed=3, reflexive=True)
    non = generate_canonical_fano_3d(8, seed=3, reflexive=False)
    assert all(is_canonical_fano(P) and is_reflexive(P) for P in refl)
    assert all(is_canonical_fano(P) and not is_reflexive(P) for P in non)
    assert all(vertices_generate_lattice(P) for P in refl + non)


def test_hull_method_and_starvation():
    polys = generate_fano_polygons(2, seed=0, method="hull", max_coord=2)
    assert all(is_fano(P) for P in polys)
    with pytest.raises(GenerationStarvedError):
        # only one reflexive triangle class fits in the unit box
        generate_fano_polygons(5, seed=0, n_vertices=3, max_coord=1, max_attempts=200)
    with pytest.raises(ValueError):
        generate_fano_polygons(0)
    with pytest.raises(ValueError):
        generate_fano_polygons(1, method="nope")


def test_equivalence_index(pentagon):
    idx = EquivalenceIndex()
    assert idx.add(pentagon)
    assert not idx.add(transform(pentagon, [[1, 1], [0, 1]]))
    assert idx.add(dual_polytope(pentagon))
    assert len(idx) == 2


def test_reflexive_census():
    classes = enumerate_reflexive_polygons()
    assert len(classes) == 16
    assert sum(1 for P in classes if P.n_vertices == 3) == 5
    for P in classes:
        assert is_reflexive(P)
        assert normalized_volume(P) + normalized_volume(dual_polytope(P)) == 12


def test_labels(pentagon, triangle):
    assert label_tuple(label(pentagon)) == (5, 7, 1, 5, True)
    assert label_tuple(label(triangle)) == (3, 9, 1, 7, True)
    lab = compute_labels(LatticePolytope([(1, 0), (0, 1), (-1, -3)]), fields=("dual_volume", "reflexive"))
    assert lab == {"dual_volume": Fraction(25, 3), "reflexive": False}
    with pytest.raises(ValueError):
        compute_labels(pentagon, fields=("colour",))
    with pytest.raises(ValueError):
        label(LatticePolytope([(-1, -1), (2, -1), (-1, 2)]))


def test_augment(pentagon):
    recs = [label(pentagon, id="a", fields=("volume",)), label(dual_polytope(pentagon), id="b", fields=("volume",))]
    rows = augment(recs, 4, seed=0)
    assert len(rows) == 8
    assert [r.id for r in rows] == ["a"] * 4 + ["b"] * 4
    assert len({r.variants[0] for r in rows[:4]}) == 4
    # each record's rows depend only on its own child seed
    assert [r.variants for r in augment(recs, 4, seed=0)] == [r.variants for r in rows]
    assert len(with_variants(recs[0], 3, seed=1).variants) == 3
    with pytest.raises(ValueError):
        augment(recs, 0)


def test_polytope_file_round_trip(tmp_path, pentagon):
    recs = augment([label(pentagon, id="pent"), label(LatticePolytope([(1, 0), (0, 1), (-1, -3)]), id="tri")], 2, seed=1)
    path = tmp_path / "p.jsonl"
    write_polytopes(path, recs, meta={"seed": 1})
    back, meta = read_polytopes_with_meta(path)
    assert meta == {"seed": 1}
    assert [(r.id, r.vertices, r.labels, r.variants) for r in back] == [(r.id, r.vertices, r.labels, r.variants) for r in recs]
    assert isinstance(back[-1].labels["dual_volume"], Fraction)


@pytest.mark.parametrize(
    "text, line",
    [
        ('{"vertices": [[1, 0], [0, 1], [-1, -1]]}\nnot json\n', 2),
        ('{"vertices": [[1, 0], [0, 1, 2]]}\n', 1),
        ('{"vertices": [[1, 0.5], [0, 1]]}\n', 1),
        ('{"vertices": []}\n', 1),
        ('{"vertices": [[1, 0]]}\n{"vertices": [[1, 0, 0]]}\n', 2),
        ('[1, 2]\n', 1),
    ],
)
def test_malformed_polytope_files(text, line):
    with pytest.raises(DataFormatError) as exc:
        parse_polytopes(text, path="x.jsonl")
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_tables_and_features(tmp_path):
    write_table(tmp_path / "t.csv", ["a", "b"], [[1, 0.1], [2, Fraction(1, 3)]], config={"k": 1})
    header, rows, config = read_table(tmp_path / "t.csv")
    assert header == ["a", "b"] and config == {"k": 1}
    assert rows[0] == ["1", "0.1"] and float(rows[1][1]) == 1 / 3
    X = [[1.0, 2.0], [3.0, 4.5]]
    write_features(tmp_path / "f.csv", X, [5, 7], groups=["g0", "g1"])
    back = read_features(tmp_path / "f.csv")
    assert back[0].tolist() == X and back[1].tolist() == [5, 7]
