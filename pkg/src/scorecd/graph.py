"""Undirected simple graphs stored as symmetric CSR adjacency.

Graphs are immutable after construction.  Node tokens from edge-list files are
remapped to dense indices 0..n-1 in first-appearance order; the mapping is kept
in ``original_ids`` so results can be reported against the source labels.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import DataError, ParseError


@dataclass(frozen=True, eq=False)
class Graph:
    """Symmetric 0/1 adjacency with no self-loops, plus the node-id map."""

    n: int
    adjacency: sp.csr_matrix
    original_ids: tuple = field(default=None)

    def __post_init__(self):
        if self.original_ids is None:
            object.__setattr__(self, "original_ids", tuple(range(self.n)))

    @property
    def num_edges(self):
        return int(self.adjacency.nnz // 2)

    def degrees(self):
        """Degree vector d, d(i) = number of neighbors of i."""
        return np.asarray(self.adjacency.sum(axis=1)).ravel().astype(np.int64)

    def matvec(self, x):
        return self.adjacency @ x

    def neighbors(self, i):
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def to_dense(self):
        return self.adjacency.toarray().astype(float)


def from_edges(edges, n, original_ids=None):
    """Build a Graph from an iterable of index pairs (0-based, deduplicated here).

    Self-loops are dropped and duplicate/reversed pairs collapse to one edge.
    """
    pairs = {(min(i, j), max(i, j)) for i, j in edges if i != j}
    if pairs:
        iu, ju = np.array(sorted(pairs), dtype=np.int64).T
    else:
        iu = ju = np.zeros(0, dtype=np.int64)
    rows = np.concatenate([iu, ju])
    cols = np.concatenate([ju, iu])
    data = np.ones(rows.size, dtype=np.int8)
    adj = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    adj.sum_duplicates()
    adj.data[:] = 1
    adj.sort_indices()
    if original_ids is None:
        original_ids = tuple(range(n))
    return Graph(n=n, adjacency=adj, original_ids=tuple(original_ids))


def load_edge_list(source, directed_collapse=False):
    """Parse whitespace-separated edge-list text into an undirected Graph.

    `source` is an iterable of lines (an open file works).  Lines starting with
    '#' or '%' and blank lines are skipped.  Every other line must hold exactly
    two node tokens.  Tokens are arbitrary strings, remapped to dense indices in
    first-appearance order.  Duplicate and reversed edges always merge and
    self-loops are dropped; `directed_collapse` documents that the source lists
    directed arcs (the polblogs hyperlinks, say) but does not change behavior.
    """
    index = {}
    ids = []
    edges = []

    def node(tok):
        i = index.get(tok)
        if i is None:
            i = len(ids)
            index[tok] = i
            ids.append(tok)
        return i

    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(f"expected two node tokens, got {len(toks)}: {line!r}",
                             line_no=line_no)
        edges.append((node(toks[0]), node(toks[1])))
    if not ids:
        raise DataError("empty edge list: no edges found in input")
    return from_edges(edges, n=len(ids), original_ids=ids)


def _induced_subgraph(g, keep):
    """Subgraph on the (sorted) index array `keep`, plus the index map."""
    keep = np.asarray(keep, dtype=np.int64)
    adj = g.adjacency[keep][:, keep].tocsr()
    adj.sort_indices()
    ids = tuple(g.original_ids[i] for i in keep)
    return Graph(n=keep.size, adjacency=adj, original_ids=ids), keep


def giant_component(g):
    """Induced subgraph on the largest connected component.

    Ties between equal-size components go to the one containing the smallest
    internal index (i.e. the earliest-appearing node token).  Returns the
    subgraph and the array mapping new indices to old ones.
    """
    if g.n == 0:
        raise DataError("empty graph")
    ncomp, comp = connected_components(g.adjacency, directed=False)
    sizes = np.bincount(comp, minlength=ncomp)
    best = sizes.max()
    # among components of maximal size, the one seen first wins
    winner = comp[np.argmax(sizes[comp] == best)]
    return _induced_subgraph(g, np.nonzero(comp == winner)[0])


def remove_isolated(g):
    """Drop all degree-0 nodes, re-indexing the rest.

    Returns the reduced graph and the new-to-old index map.  Raises if nothing
    survives.
    """
    keep = np.nonzero(g.degrees() > 0)[0]
    if keep.size == 0:
        raise DataError("empty graph after preprocessing: all nodes are isolated")
    return _induced_subgraph(g, keep)


def load_labels(source, id_order):
    """Read ground-truth labels ("node_token label_token" per line).

    Returns an integer label vector aligned with `id_order` (labels coded
    1..K by first appearance along that order) plus the token-to-code map.
    Unlabeled nodes are an error.
    """
    table = {}
    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(f"expected 'node label', got: {line!r}", line_no=line_no)
        table[toks[0]] = toks[1]
    missing = [str(t) for t in id_order if str(t) not in table]
    if missing:
        raise DataError(f"{len(missing)} nodes have no ground-truth label "
                        f"(first missing: {missing[0]!r})")
    codes = {}
    out = np.empty(len(id_order), dtype=np.int64)
    for pos, tok in enumerate(id_order):
        lab = table[str(tok)]
        if lab not in codes:
            codes[lab] = len(codes) + 1
        out[pos] = codes[lab]
    return out, codes
