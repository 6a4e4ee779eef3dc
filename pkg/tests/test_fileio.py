import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_array_equal

from npgraph.errors import InputError, ParseError
from npgraph.fileio import (atomic_write, format_graph, model_from_json, model_to_dict,
                            model_to_json, parse_graph, read_graph, write_graph)
from npgraph.forest import evaluate_log_density, fit_forest
from npgraph.graphs import Graph
from npgraph.numerics import make_rng

labels_st = st.lists(st.text("abcXYZ_0123", min_size=1, max_size=4), min_size=1, max_size=7,
                     unique=True)


@st.composite
def graphs(draw):
    labels = draw(labels_st)
    d = len(labels)
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    weighted = draw(st.booleans())
    weights = None
    if weighted:
        weights = draw(st.lists(st.floats(allow_nan=False, allow_infinity=False),
                                min_size=len(edges), max_size=len(edges)))
    return Graph(tuple(labels), tuple(edges), weights)


@settings(max_examples=100, deadline=None)
@given(graphs(), st.sampled_from(["tsv", "dot", "json"]))
def test_roundtrip(g, fmt):
    text = format_graph(g, fmt)
    back = parse_graph(text, fmt)
    assert back == g
    assert format_graph(back, fmt) == text


def test_tsv_layout():
    g = Graph(("a", "b", "c"), ((1, 2), (0, 1)), (0.25, -0.5))
    assert format_graph(g, "tsv") == "# vertices: a,b,c\na\tb\t-0.5\nb\tc\t0.25\n"
    assert format_graph(g.unweighted(), "tsv") == "# vertices: a,b,c\na\tb\nb\tc\n"


def test_dot_layout():
    g = Graph(("a", "b"), ((0, 1),), (1.5,))
    assert format_graph(g, "dot") == 'graph G {\n  "a";\n  "b";\n  "a" -- "b" [weight=1.5];\n}\n'


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_graph("a\tb\n", "tsv")
    with pytest.raises(ParseError):
        parse_graph("# vertices: a,b\na\tz\n", "tsv")
    with pytest.raises(ParseError):
        parse_graph("# vertices: a,b\na\tb\tx\n", "tsv")
    with pytest.raises(ParseError):
        parse_graph("digraph {\n}\n", "dot")
    with pytest.raises(ParseError):
        parse_graph("{", "json")


def test_unwritable_label():
    with pytest.raises(InputError):
        format_graph(Graph(("a,b", "c")), "tsv")


def test_file_helpers(tmp_path):
    g = Graph(("x", "y", "z"), ((0, 2),), (0.1,))
    for ext in ("tsv", "dot", "json", "gv"):
        p = tmp_path / f"g.{ext}"
        write_graph(str(p), g)
        assert read_graph(str(p)) == g
    atomic_write(str(tmp_path / "t.txt"), "hello\n")
    assert (tmp_path / "t.txt").read_text() == "hello\n"
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".tmp")] == []


def test_model_json_roundtrip():
    rng = make_rng(1)
    z = rng.standard_normal((400, 3))
    x = np.column_stack([z[:, 0], z[:, 0] + 0.5 * z[:, 1], z[:, 2]])
    model = fit_forest(x, seed=2, grid_size=30)
    text = model_to_json(model)
    obj = model_to_dict(model)
    assert obj["schema_version"] == 1
    assert obj["selection"]["k_hat"] == model.selection.k_hat
    back = model_from_json(text)
    assert back.forest == model.forest
    assert_array_equal(evaluate_log_density(back, x[:20]), evaluate_log_density(model, x[:20]))
    with pytest.raises(ParseError):
        model_from_json(text.replace('"schema_version": 1', '"schema_version": 9'))
