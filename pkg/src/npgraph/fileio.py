"""Graph and model file formats.

Edge-list TSV::

    # vertices: a,b,c
    a<TAB>b<TAB>0.25
    b<TAB>c<TAB>-0.5

Edges are written by label, ordered by vertex index with ``i < j``; the weight
column is omitted for unweighted graphs.  Floats are written with ``repr`` so
every file parses back to the identical graph.
"""

import json
import os
import re
import tempfile

import numpy as np

from . import __version__
from .errors import InputError, ParseError
from .graphs import Graph
from .kde import AffineMaps, GridSpec, KdeTable
from .mutual_info import KdeTables, _edge_order

SCHEMA_VERSION = 1
GRAPH_FORMATS = ("tsv", "dot", "json")


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_labels(labels):
    for name in labels:
        if not name or any(ch in name for ch in ',\t\n"'):
            raise InputError(f"vertex label {name!r} cannot be written to a graph file")


def graph_to_tsv(g):
    _check_labels(g.labels)
    lines = ["# vertices: " + ",".join(g.labels)]
    for k, (i, j) in enumerate(g.edges):
        fields = [g.labels[i], g.labels[j]]
        if g.weights is not None:
            fields.append(repr(g.weights[k]))
        lines.append("\t".join(fields))
    return "\n".join(lines) + "\n"


def graph_from_tsv(text):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# vertices:"):
        raise ParseError("missing '# vertices:' header", row=1)
    spec = lines[0][len("# vertices:"):].strip()
    labels = tuple(spec.split(",")) if spec else ()
    index = {name: k for k, name in enumerate(labels)}
    edges, weights = [], []
    weighted = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise ParseError("expected 2 or 3 tab-separated fields", row=lineno)
        has_w = len(fields) == 3
        if weighted is None:
            weighted = has_w
        elif weighted != has_w:
            raise ParseError("mixed weighted and unweighted edges", row=lineno)
        try:
            edges.append((index[fields[0]], index[fields[1]]))
        except KeyError as exc:
            raise ParseError(f"unknown vertex {exc.args[0]!r}", row=lineno) from None
        if has_w:
            try:
                weights.append(float(fields[2]))
            except ValueError:
                raise ParseError(f"bad weight {fields[2]!r}", row=lineno, col=3) from None
    return Graph(labels, tuple(edges), tuple(weights) if weighted else None)


def graph_to_dot(g):
    _check_labels(g.labels)
    lines = ["graph G {"]
    lines += [f'  "{name}";' for name in g.labels]
    for k, (i, j) in enumerate(g.edges):
        attr = f" [weight={g.weights[k]!r}]" if g.weights is not None else ""
        lines.append(f'  "{g.labels[i]}" -- "{g.labels[j]}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"


_DOT_NODE = re.compile(r'^\s*"([^"]*)"\s*;\s*$')
_DOT_EDGE = re.compile(r'^\s*"([^"]*)"\s*--\s*"([^"]*)"\s*(?:\[weight=([^\]]+)\])?\s*;\s*$')


def graph_from_dot(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].strip().startswith("graph") or lines[-1].strip() != "}":
        raise ParseError("not an undirected DOT graph")
    labels, edges, weights = [], [], []
    for lineno, line in enumerate(lines[1:-1], start=2):
        m = _DOT_EDGE.match(line)
        if m:
            edges.append((m.group(1), m.group(2)))
            weights.append(m.group(3))
            continue
        m = _DOT_NODE.match(line)
        if not m:
            raise ParseError(f"unrecognized DOT statement {line.strip()!r}", row=lineno)
        labels.append(m.group(1))
    index = {name: k for k, name in enumerate(labels)}
    try:
        pairs = tuple((index[a], index[b]) for a, b in edges)
    except KeyError as exc:
        raise ParseError(f"edge references undeclared vertex {exc.args[0]!r}") from None
    if weights and any(w is None for w in weights) and not all(w is None for w in weights):
        raise ParseError("mixed weighted and unweighted edges")
    w = None if not weights or weights[0] is None else tuple(float(v) for v in weights)
    return Graph(tuple(labels), pairs, w)


def graph_to_json(g):
    obj = {
        "schema_version": SCHEMA_VERSION,
        "vertices": list(g.labels),
        "edges": [[i, j] for i, j in g.edges],
        "weights": None if g.weights is None else list(g.weights),
    }
    return json.dumps(obj, indent=2) + "\n"


def graph_from_json(text):
    try:
        obj = json.loads(text)
        w = obj.get("weights")
        return Graph(tuple(obj["vertices"]), tuple(tuple(e) for e in obj["edges"]),
                     None if w is None else tuple(w))
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from None


_WRITERS = {"tsv": graph_to_tsv, "dot": graph_to_dot, "json": graph_to_json}
_READERS = {"tsv": graph_from_tsv, "dot": graph_from_dot, "json": graph_from_json}


def format_graph(g, fmt):
    return _WRITERS[fmt](g)


def parse_graph(text, fmt):
    return _READERS[fmt](text)


def guess_format(path):
    ext = os.path.splitext(path)[1].lstrip(".").lower()
    if ext == "gv":
        ext = "dot"
    return ext if ext in GRAPH_FORMATS else "tsv"


def write_graph(path, g, fmt=None):
    atomic_write(path, format_graph(g, fmt or guess_format(path)))


def read_graph(path, fmt=None):
    with open(path) as fh:
        return parse_graph(fh.read(), fmt or guess_format(path))


def model_to_dict(model):
    """JSON-ready description of a :class:`ForestDensityModel`."""
    t = model.tables
    obj = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "vertices": list(model.labels),
        "edges": [[i, j] for i, j in model.forest.edges],
        "edge_weights": None if model.forest.weights is None else list(model.forest.weights),
        "grid": t.grid.points.tolist(),
        "floor": t.floor,
        "bandwidths": np.asarray(t.bandwidths).tolist(),
        "pair_bandwidths": np.asarray(t.pair_bandwidths).tolist(),
        "maps": {"scale": model.maps.scale.tolist(), "offset": model.maps.offset.tolist()},
        "univariate": [u.values.tolist() for u in t.univariate],
        "bivariate": {f"{i},{j}": t.bivariate[(i, j)].values.tolist()
                      for i, j in model.forest.edges},
    }
    sel = model.selection
    if sel is not None:
        obj["selection"] = {
            "k_hat": sel.k_hat,
            "heldout_loglik": list(sel.curve.loglik),
            "edge_terms": list(sel.curve.edge_terms),
            "kruskal_order": [list(e) for e in _edge_order(sel.stages) if e is not None],
            "mutual_information": sel.mi.entries.tolist(),
            "n1": sel.n1,
            "n2": sel.n2,
            "seed": sel.seed,
        }
    return obj


def model_to_json(model):
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def model_from_json(text):
    """Rebuild a model for evaluation (split-1 samples are not stored)."""
    from .forest import ForestDensityModel

    try:
        obj = json.loads(text)
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise ParseError(f"unsupported schema_version {obj.get('schema_version')!r}")
        labels = tuple(obj["vertices"])
        w = obj.get("edge_weights")
        forest = Graph(labels, tuple(tuple(e) for e in obj["edges"]),
                       None if w is None else tuple(w))
        grid = GridSpec(np.array(obj["grid"]))
        floor = float(obj["floor"])
        h = np.array(obj["bandwidths"], dtype=float)
        g = np.array(obj["pair_bandwidths"], dtype=float)
        uni = tuple(KdeTable(np.array(v), grid, (h[k],), floor)
                    for k, v in enumerate(obj["univariate"]))
        bi = {}
        for key, v in obj["bivariate"].items():
            i, j = (int(s) for s in key.split(","))
            bi[(i, j)] = KdeTable(np.array(v), grid, (g[i], g[j]), floor)
        tables = KdeTables(np.empty((0, len(labels))), h, grid, floor, uni, bi, g)
        maps = AffineMaps(np.array(obj["maps"]["scale"]), np.array(obj["maps"]["offset"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad model JSON: {exc}") from None
    return ForestDensityModel(forest, tables, maps, None)
