import pytest

from linkmirage import (Graph, GraphFormatError, load_edge_list, load_sequence,
                        union_graph, write_edge_list)


def test_edges_canonicalized_and_deduped():
    g = Graph([(2, 1), (1, 2), (0, 1)])
    assert g.edges.tolist() == [[0, 1], [1, 2]]
    assert g.num_edges == 2
    assert g.num_vertices == 3


def test_self_loop_rejected():
    with pytest.raises(ValueError, match="self-loop"):
        Graph([(3, 3)])


def test_isolated_vertices_kept():
    g = Graph([(0, 1)], vertices=[0, 1, 7])
    assert g.num_vertices == 3
    assert g.degree(7) == 0
    assert g.neighbors(7).size == 0


def test_adjacency_consistent_with_edges():
    g = Graph([(0, 1), (1, 2), (0, 2), (2, 3)])
    assert g.neighbors(2).tolist() == [0, 1, 3]
    assert g.has_edge(0, 2) and g.has_edge(2, 0)
    assert not g.has_edge(0, 3)
    assert g.degree(2) == 3


def test_subgraph_induced():
    g = Graph([(0, 1), (1, 2), (0, 2), (2, 3)])
    sub = g.subgraph([0, 1, 3])
    assert sub.edge_set() == {(0, 1)}
    assert sub.num_vertices == 3   # 3 stays even though isolated


def test_load_edge_list_basics(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# comment\n0 1\n1 2\n")
    g = load_edge_list(p)
    assert set(g.vertices.tolist()) == {0, 1, 2}
    assert g.edge_set() == {(0, 1), (1, 2)}


def test_load_edge_list_collapses_reverse_duplicates(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 0\n")
    g = load_edge_list(p)
    assert g.num_edges == 1


def test_load_edge_list_rejects_self_loop_with_line(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n3 3\n")
    with pytest.raises(GraphFormatError, match=r":2: self-loop"):
        load_edge_list(p)


def test_load_edge_list_reports_parse_error_line(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\nnot an edge here\n")
    with pytest.raises(GraphFormatError, match=r":2:"):
        load_edge_list(p)


def test_edge_list_roundtrip(tmp_path):
    g = Graph([(0, 5), (5, 9), (0, 9)])
    path = tmp_path / "g.txt"
    write_edge_list(g, path, header_lines=["meta"])
    assert load_edge_list(path) == g


def test_load_sequence(tmp_path):
    for t in range(3):
        (tmp_path / f"g{t}.txt").write_text(f"0 {t + 1}\n")
    manifest = tmp_path / "manifest.txt"
    manifest.write_text("g0.txt\ng1.txt\ng2.txt\n")
    seq = load_sequence(manifest)
    assert len(seq) == 3
    assert seq[2].edge_set() == {(0, 3)}


def test_load_sequence_single_file_is_static_case(tmp_path):
    (tmp_path / "g0.txt").write_text("0 1\n")
    manifest = tmp_path / "manifest.txt"
    manifest.write_text("g0.txt\n")
    assert len(load_sequence(manifest)) == 1


def test_load_sequence_nine_snapshots(tmp_path):
    # shape of a typical social snapshot series: nine quarterly files
    names = []
    for t in range(9):
        name = f"snap_{t}.txt"
        (tmp_path / name).write_text(f"0 {t + 1}\n{t + 1} {t + 2}\n")
        names.append(name)
    manifest = tmp_path / "manifest.txt"
    manifest.write_text("\n".join(names) + "\n")
    seq = load_sequence(manifest)
    assert len(seq) == 9
    assert all(g.num_edges == 2 for g in seq.snapshots)


def test_load_sequence_missing_file(tmp_path):
    manifest = tmp_path / "manifest.txt"
    manifest.write_text("absent.txt\n")
    with pytest.raises(FileNotFoundError):
        load_sequence(manifest)


def test_load_sequence_empty_manifest(tmp_path):
    manifest = tmp_path / "manifest.txt"
    manifest.write_text("# nothing\n")
    with pytest.raises(GraphFormatError):
        load_sequence(manifest)


def test_union_graph_single_is_identity(triangle):
    assert union_graph([triangle]) == triangle


def test_union_graph_merges_edges():
    a = Graph([(0, 1)])
    b = Graph([(1, 2)])
    assert union_graph([a, b]).edge_set() == {(0, 1), (1, 2)}


def test_union_graph_disjoint_counts_add():
    a = Graph([(0, 1), (1, 2)])
    b = Graph([(10, 11), (11, 12), (10, 12)])
    assert union_graph([a, b]).num_edges == a.num_edges + b.num_edges
