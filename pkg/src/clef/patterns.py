"""Merge trees: transformation patterns learned from program pairs.

A merge tree mirrors the shape shared by an incorrect program and its
corrected version, with marker nodes for the parts that changed: Deleted and
Inserted subtrees and Mutated (before/after) rewrites.  Learning proceeds per
control-flow region: align same-kind control-flow nodes top-down, flatten each
aligned region by collapsing nested control flow into placeholder leaves, run
the weighted tree edit distance on the two small flattened trees, and fold the
resulting edit script into markers.  Control-flow nodes without a partner
become whole-subtree Deleted/Inserted markers grafted at their placeholder
position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Union

from .distance import CostModel, EditScript, Num, learning_cost_model, ted
from .nodes import (
    Ast,
    Node,
    NodeKind,
    Path,
    is_prefix,
    iter_preorder,
    iter_preorder_paths,
    node_at,
    replace_many,
    structural_key,
)

POOL_VERSION = "1"

PLACEHOLDER_PREFIX = "@"

_KIND_BY_WORD = {k.value.lower(): k for k in NodeKind}


def placeholder(kind: NodeKind, tag: str) -> Node:
    return Node(NodeKind.EMPTY, f"{PLACEHOLDER_PREFIX}{kind.value.lower()}:{tag}")


def is_placeholder(node: Node) -> bool:
    return node.kind is NodeKind.EMPTY and node.label.startswith(PLACEHOLDER_PREFIX)


def placeholder_kind(node: Node) -> NodeKind:
    word = node.label[len(PLACEHOLDER_PREFIX):].split(":", 1)[0]
    return _KIND_BY_WORD[word]


# ---------------------------------------------------------------------------
# Merge tree structure


class Marker(str, Enum):
    PLAIN = "plain"
    DELETED = "deleted"
    INSERTED = "inserted"
    MUTATED = "mutated"


@dataclass(frozen=True, slots=True)
class MergeNode:
    marker: Marker
    kind: Optional[NodeKind] = None  # plain nodes only
    label: str = ""
    children: tuple["MergeNode", ...] = ()
    node: Optional[Node] = None  # deleted/inserted subtree
    from_node: Optional[Node] = None  # mutated
    to_node: Optional[Node] = None


def plain(kind: NodeKind, label: str, children: Iterable[MergeNode] = ()) -> MergeNode:
    return MergeNode(Marker.PLAIN, kind=kind, label=label, children=tuple(children))


def deleted(node: Node) -> MergeNode:
    return MergeNode(Marker.DELETED, node=node)


def inserted(node: Node) -> MergeNode:
    return MergeNode(Marker.INSERTED, node=node)


def mutated(from_node: Node, to_node: Node) -> MergeNode:
    return MergeNode(Marker.MUTATED, from_node=from_node, to_node=to_node)


def merge_key(mn: MergeNode) -> tuple:
    """Hashable structural identity, used for pool deduplication."""
    if mn.marker is Marker.PLAIN:
        return ("p", mn.kind.value, mn.label, tuple(merge_key(c) for c in mn.children))
    if mn.marker is Marker.DELETED:
        return ("d", structural_key(mn.node))
    if mn.marker is Marker.INSERTED:
        return ("i", structural_key(mn.node))
    return ("m", structural_key(mn.from_node), structural_key(mn.to_node))


def readout(mn: MergeNode, side: str) -> list[Node]:
    """Project one side out of a merge fragment.

    ``side`` is ``"incorrect"`` or ``"correct"``.  Plain nodes appear on both
    sides, Deleted only on the incorrect side, Inserted only on the correct
    side, Mutated as its matching half.
    """
    incorrect = side == "incorrect"
    if mn.marker is Marker.PLAIN:
        kids: list[Node] = []
        for c in mn.children:
            kids.extend(readout(c, side))
        return [Node(mn.kind, mn.label, tuple(kids))]
    if mn.marker is Marker.DELETED:
        return [mn.node] if incorrect else []
    if mn.marker is Marker.INSERTED:
        return [] if incorrect else [mn.node]
    return [mn.from_node if incorrect else mn.to_node]


@dataclass(frozen=True)
class MergeTree:
    root: MergeNode
    origin: tuple[str, str]  # (pair id, problem id)
    transformation_size: Num

    def region_kind(self) -> NodeKind:
        if self.root.marker is Marker.PLAIN:
            return self.root.kind
        if self.root.marker is Marker.MUTATED:
            return self.root.from_node.kind
        return self.root.node.kind


@dataclass
class PoolEntry:
    tree: MergeTree
    frequency: int = 1


@dataclass
class MergeTreePool:
    problem_id: str = ""
    version: str = POOL_VERSION
    entries: list[PoolEntry] = field(default_factory=list)

    def add(self, tree: MergeTree, frequency: int = 1) -> None:
        key = merge_key(tree.root)
        for entry in self.entries:
            if merge_key(entry.tree.root) == key:
                entry.frequency += frequency
                return
        self.entries.append(PoolEntry(tree, frequency))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PoolEntry]:
        return iter(self.entries)


# ---------------------------------------------------------------------------
# Control-flow alignment


@dataclass(frozen=True, slots=True)
class AlignedPair:
    path_i: Path
    path_c: Path


@dataclass(frozen=True)
class AlignmentResult:
    aligned: tuple[AlignedPair, ...]
    unmatched_incorrect: tuple[Path, ...]
    unmatched_correct: tuple[Path, ...]


def cf_tops_below(node: Node, base: Path) -> list[tuple[Path, Node]]:
    """Maximal control-flow nodes strictly below ``node``, in preorder."""
    out: list[tuple[Path, Node]] = []

    def walk(n: Node, path: Path) -> None:
        for i, c in enumerate(n.children):
            if c.is_control_flow():
                out.append((path + (i,), c))
            else:
                walk(c, path + (i,))

    walk(node, base)
    return out


def _as_root(tree: Ast | Node) -> Node:
    return tree.root if isinstance(tree, Ast) else tree


def control_flow_align(p_i: Ast | Node, p_c: Ast | Node) -> AlignmentResult:
    """Pair up same-kind control-flow nodes top-down.

    Two nodes may pair only while their nearest aligned control-flow ancestors
    are partners; a node whose ancestors found no partner competes in its
    ancestor's region.  Ties break leftmost-first in preorder.
    """
    r_i, r_c = _as_root(p_i), _as_root(p_c)
    aligned: list[AlignedPair] = []
    unmatched_i: list[Path] = []
    unmatched_c: list[Path] = []
    root_i_tops = [(p, n) for p, n in ([((), r_i)] if r_i.is_control_flow() else [])]
    root_c_tops = [(p, n) for p, n in ([((), r_c)] if r_c.is_control_flow() else [])]
    _align_region(
        root_i_tops or cf_tops_below(r_i, ()),
        root_c_tops or cf_tops_below(r_c, ()),
        r_i,
        r_c,
        aligned,
        unmatched_i,
        unmatched_c,
    )
    return AlignmentResult(tuple(aligned), tuple(unmatched_i), tuple(unmatched_c))


def _align_region(
    tops_i: list[tuple[Path, Node]],
    tops_c: list[tuple[Path, Node]],
    root_i: Node,
    root_c: Node,
    aligned: list[AlignedPair],
    unmatched_i: list[Path],
    unmatched_c: list[Path],
) -> None:
    cand_i = list(tops_i)
    cand_c = list(tops_c)
    matched_i: set[Path] = set()
    matched_c: set[Path] = set()
    expanded_i: set[Path] = set()
    expanded_c: set[Path] = set()
    pairs: list[tuple[tuple[Path, Node], tuple[Path, Node]]] = []
    while True:
        progressed = False
        for pi, ni in cand_i:
            if pi in matched_i:
                continue
            for pc, nc in cand_c:
                if pc in matched_c:
                    continue
                if ni.kind is nc.kind and _alignment_condition(ni, nc):
                    matched_i.add(pi)
                    matched_c.add(pc)
                    pairs.append(((pi, ni), (pc, nc)))
                    progressed = True
                    break
        if progressed:
            continue
        # No pair found: let the interiors of unmatched nodes compete in this
        # region (their nearest aligned ancestor is still this region's).
        grew = False
        for pi, ni in list(cand_i):
            if pi in matched_i or pi in expanded_i:
                continue
            expanded_i.add(pi)
            inner = cf_tops_below(ni, pi)
            if inner:
                cand_i.extend(inner)
                grew = True
        for pc, nc in list(cand_c):
            if pc in matched_c or pc in expanded_c:
                continue
            expanded_c.add(pc)
            inner = cf_tops_below(nc, pc)
            if inner:
                cand_c.extend(inner)
                grew = True
        if not grew:
            break
        cand_i.sort(key=lambda pn: pn[0])
        cand_c.sort(key=lambda pn: pn[0])

    for (pi, ni), (pc, nc) in pairs:
        aligned.append(AlignedPair(pi, pc))
        _align_region(
            cf_tops_below(ni, pi), cf_tops_below(nc, pc),
            ni, nc, aligned, unmatched_i, unmatched_c,
        )

    un_i = sorted(p for p, _ in cand_i if p not in matched_i)
    un_c = sorted(p for p, _ in cand_c if p not in matched_c)
    unmatched_i.extend(_maximal(un_i))
    unmatched_c.extend(_maximal(un_c))


def _maximal(paths: list[Path]) -> list[Path]:
    out: list[Path] = []
    for p in paths:
        if not any(is_prefix(q, p) and q != p for q in out):
            out.append(p)
    return out


def _alignment_condition(a: Node, b: Node) -> bool:
    """Type-specific alignment test (same kind assumed)."""
    if a.kind is NodeKind.IF:
        if _alpha_seq([(a.children[0], b.children[0])]):
            return True
        if len(a.children) != len(b.children):
            return False
        return _alpha_seq(list(zip(a.children[1:], b.children[1:])))
    if a.kind is NodeKind.WHILE:
        return _alpha_seq([(a.children[0], b.children[0])]) or _alpha_seq(
            [(a.children[1], b.children[1])]
        )
    if a.kind is NodeKind.FOR:
        if _alpha_seq(list(zip(a.children[:3], b.children[:3]))):
            return True
        return _alpha_seq([(a.children[3], b.children[3])])
    # calls: every argument must match; callee names are free to differ
    if len(a.children) != len(b.children):
        return False
    return _alpha_seq(list(zip(a.children[1:], b.children[1:])))


def _alpha_seq(pairs: list[tuple[Node, Node]]) -> bool:
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    return all(_alpha_equal(a, b, fwd, bwd) for a, b in pairs)


def _alpha_equal(a: Node, b: Node, fwd: dict[str, str], bwd: dict[str, str]) -> bool:
    """Structural equality modulo a consistent renaming of identifiers."""
    if a.kind is not b.kind or len(a.children) != len(b.children):
        return False
    if a.kind is NodeKind.IDENTIFIER:
        if not _bind(a.label, b.label, fwd, bwd):
            return False
    elif a.kind is NodeKind.FUNC_DEF:
        at, _, an = a.label.rpartition(" ")
        bt, _, bn = b.label.rpartition(" ")
        if at != bt or not _bind(an, bn, fwd, bwd):
            return False
    elif a.label != b.label:
        return False
    return all(_alpha_equal(x, y, fwd, bwd) for x, y in zip(a.children, b.children))


def _bind(a: str, b: str, fwd: dict[str, str], bwd: dict[str, str]) -> bool:
    if fwd.get(a, b) != b or bwd.get(b, a) != a:
        return False
    fwd[a] = b
    bwd[b] = a
    return True


def alpha_equivalent(a: Node, b: Node) -> bool:
    """True when the trees differ only by a consistent identifier renaming."""
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    return _alpha_equal(a, b, fwd, bwd)


# ---------------------------------------------------------------------------
# Flattening


@dataclass
class FlatTree:
    root: Node
    placeholders: dict[str, Node]  # placeholder label -> original subtree


def flatten(
    t_i: Node,
    t_c: Node,
    aligned_pairs: Iterable[tuple[Path, Path]] = (),
) -> tuple[FlatTree, FlatTree]:
    """Collapse nested control flow into placeholder leaves on both sides.

    ``aligned_pairs`` holds region-relative path pairs of aligned control-flow
    nodes; pairs whose two nodes are both immediate tops of this region share
    a correlation tag, so the edit distance treats them as matching leaves.
    """
    tops_i = cf_tops_below(t_i, ())
    tops_c = cf_tops_below(t_c, ())
    top_paths_i = {p for p, _ in tops_i}
    top_paths_c = {p for p, _ in tops_c}
    partner = {pi: pc for pi, pc in aligned_pairs}
    labels_i: dict[Path, str] = {}
    labels_c: dict[Path, str] = {}
    shared = 0
    for p, n in tops_i:
        mate = partner.get(p)
        if mate is not None and mate in top_paths_c:
            tag = f"c{shared}"
            shared += 1
            labels_i[p] = _ph_label(n, tag)
            labels_c[mate] = _ph_label(n, tag)
    for j, (p, n) in enumerate(tops_i):
        if p not in labels_i:
            labels_i[p] = _ph_label(n, f"i{j}")
    for j, (p, n) in enumerate(tops_c):
        if p not in labels_c:
            labels_c[p] = _ph_label(n, f"o{j}")
    return (
        _flatten_one(t_i, tops_i, labels_i),
        _flatten_one(t_c, tops_c, labels_c),
    )


def _ph_label(node: Node, tag: str) -> str:
    return f"{PLACEHOLDER_PREFIX}{node.kind.value.lower()}:{tag}"


def _flatten_one(
    root: Node, tops: list[tuple[Path, Node]], labels: dict[Path, str]
) -> FlatTree:
    replacements = {p: Node(NodeKind.EMPTY, labels[p]) for p, _ in tops}
    originals = {labels[p]: n for p, n in tops}
    return FlatTree(replace_many(root, replacements), originals)


# ---------------------------------------------------------------------------
# Merging edit scripts into fragments


def merge(edits: EditScript, f_i: FlatTree, f_c: FlatTree) -> MergeNode:
    """Fold a tree-edit script over two flattened trees into one fragment.

    Untouched structure becomes Plain, whole-subtree removals and additions
    become Deleted/Inserted, and positionally paired rewrites become Mutated.
    Groupings that do not reduce to one-to-one rewrites degrade to adjacent
    Deleted+Inserted markers, which preserves both readouts.
    """
    a_paths = [p for p, _ in iter_preorder_paths(f_i.root)]
    b_paths = [p for p, _ in iter_preorder_paths(f_c.root)]
    map_pairs = [(a_paths[ai], b_paths[bi]) for ai, bi in edits.mapping]
    map_set = set(map_pairs)

    root_a, root_b = f_i.root, f_c.root
    if ((), ()) in map_set and root_a.kind is root_b.kind and root_a.label == root_b.label:
        return _merge_build((), (), root_a, root_b, map_pairs, map_set)
    return mutated(root_a, root_b)


def _merge_build(
    pa: Path,
    pb: Path,
    na: Node,
    nb: Node,
    map_pairs: list[tuple[Path, Path]],
    map_set: set[tuple[Path, Path]],
) -> MergeNode:
    la, lb = len(na.children), len(nb.children)
    touch: dict[int, set[int]] = {}
    for x, y in map_pairs:
        if (
            len(x) > len(pa)
            and x[: len(pa)] == pa
            and len(y) > len(pb)
            and y[: len(pb)] == pb
        ):
            touch.setdefault(x[len(pa)], set()).add(y[len(pb)])

    groups: list[list[int]] = []  # [a_lo, a_hi, b_lo, b_hi]
    for k in sorted(touch):
        jlo, jhi = min(touch[k]), max(touch[k])
        if groups and jlo <= groups[-1][3]:
            groups[-1][1] = k
            groups[-1][3] = max(groups[-1][3], jhi)
        else:
            groups.append([k, k, jlo, jhi])

    out: list[MergeNode] = []
    ai, bi = 0, 0
    for a_lo, a_hi, b_lo, b_hi in groups + [[la, la, lb, lb]]:
        for k in range(ai, a_lo):
            out.append(deleted(na.children[k]))
        for j in range(bi, b_lo):
            out.append(inserted(nb.children[j]))
        if a_lo == la:
            break
        if a_lo == a_hi and b_lo == b_hi:
            ca, cb = na.children[a_lo], nb.children[b_lo]
            if (pa + (a_lo,), pb + (b_lo,)) in map_set and ca.kind is cb.kind and ca.label == cb.label:
                out.append(
                    _merge_build(pa + (a_lo,), pb + (b_lo,), ca, cb, map_pairs, map_set)
                )
            else:
                out.append(mutated(ca, cb))
        else:
            for k in range(a_lo, a_hi + 1):
                out.append(deleted(na.children[k]))
            for j in range(b_lo, b_hi + 1):
                out.append(inserted(nb.children[j]))
        ai, bi = a_hi + 1, b_hi + 1
    return plain(na.kind, na.label, out)


# ---------------------------------------------------------------------------
# Augmenting unmatched control flow and finalizing fragments


def augment(fragment: MergeNode, at_label: str, subtree: Node, side: str) -> MergeNode:
    """Graft a whole-subtree marker where placeholder ``at_label`` sits.

    ``side`` is ``"incorrect"`` (a deletion) or ``"correct"`` (an insertion).
    The placeholder's position encodes the unmatched node's nearest aligned
    ancestor and sibling index.
    """
    marker = deleted(subtree) if side == "incorrect" else inserted(subtree)

    def walk(mn: MergeNode) -> MergeNode:
        if mn.marker is Marker.PLAIN:
            if mn.kind is NodeKind.EMPTY and mn.label == at_label:
                return marker
            return plain(mn.kind, mn.label, [walk(c) for c in mn.children])
        return mn

    return walk(fragment)


def _subst_placeholders(node: Node, table: dict[str, Node], keep: set[str]) -> Node:
    if is_placeholder(node):
        if node.label in keep:
            return node
        return table[node.label]
    if not node.children:
        return node
    return node.with_children(
        tuple(_subst_placeholders(c, table, keep) for c in node.children)
    )


def _placeholder_labels(node: Node) -> set[str]:
    return {n.label for n in iter_preorder(node) if is_placeholder(n)}


def _resolve(mn: MergeNode, ph_i: dict[str, Node], ph_c: dict[str, Node]) -> list[MergeNode]:
    """Expand leftover placeholders inside markers back to concrete subtrees.

    Correlated placeholder pairs that appear on both sides of a Mutated marker
    stay as paired wildcards; a Mutated between two bare placeholders becomes
    the Deleted+Inserted pair of the original whole subtrees.
    """
    if mn.marker is Marker.PLAIN:
        if mn.kind is NodeKind.EMPTY and mn.label.startswith(PLACEHOLDER_PREFIX):
            return [mn]  # correlated wildcard hole
        kids: list[MergeNode] = []
        for c in mn.children:
            kids.extend(_resolve(c, ph_i, ph_c))
        return [plain(mn.kind, mn.label, kids)]
    if mn.marker is Marker.DELETED:
        return [deleted(_subst_placeholders(mn.node, ph_i, set()))]
    if mn.marker is Marker.INSERTED:
        return [inserted(_subst_placeholders(mn.node, ph_c, set()))]
    # mutated
    if is_placeholder(mn.from_node) and is_placeholder(mn.to_node):
        return [
            deleted(ph_i[mn.from_node.label]),
            inserted(ph_c[mn.to_node.label]),
        ]
    shared = _placeholder_labels(mn.from_node) & _placeholder_labels(mn.to_node)
    return [
        mutated(
            _subst_placeholders(mn.from_node, ph_i, shared),
            _subst_placeholders(mn.to_node, ph_c, shared),
        )
    ]


def _renumber(mn: MergeNode) -> MergeNode:
    """Canonicalize placeholder tags so equal patterns deduplicate."""
    table: dict[str, str] = {}

    def fresh(label: str) -> str:
        if label not in table:
            word = label[len(PLACEHOLDER_PREFIX):].split(":", 1)[0]
            table[label] = f"{PLACEHOLDER_PREFIX}{word}:{len(table)}"
        return table[label]

    def fix_node(n: Node) -> Node:
        if is_placeholder(n):
            return Node(n.kind, fresh(n.label))
        if not n.children:
            return n
        return n.with_children(tuple(fix_node(c) for c in n.children))

    def walk(m: MergeNode) -> MergeNode:
        if m.marker is Marker.PLAIN:
            if m.kind is NodeKind.EMPTY and m.label.startswith(PLACEHOLDER_PREFIX):
                return MergeNode(Marker.PLAIN, kind=m.kind, label=fresh(m.label))
            return plain(m.kind, m.label, [walk(c) for c in m.children])
        if m.marker is Marker.DELETED:
            return deleted(fix_node(m.node))
        if m.marker is Marker.INSERTED:
            return inserted(fix_node(m.node))
        return mutated(fix_node(m.from_node), fix_node(m.to_node))

    return walk(mn)


def fragment_size(mn: MergeNode, cm: CostModel) -> Num:
    """Total edit cost a fragment's markers represent under ``cm``."""
    if mn.marker is Marker.PLAIN:
        return sum(fragment_size(c, cm) for c in mn.children)
    if mn.marker is Marker.DELETED:
        return sum(cm.delete_cost(n) for n in iter_preorder(mn.node))
    if mn.marker is Marker.INSERTED:
        return sum(cm.insert_cost(n) for n in iter_preorder(mn.node))
    return ted(mn.from_node, mn.to_node, cm).distance


# ---------------------------------------------------------------------------
# Learning


def learn_transformations(
    p_i: Ast | Node,
    p_c: Ast | Node,
    cf_weight: Num = 10,
    origin: tuple[str, str] = ("pair-0", ""),
) -> MergeTreePool:
    """Run the full per-pair learning pass and pool the resulting patterns.

    Produces one merge tree per control-flow region with nonzero edits (the
    whole-program region included); unmatched control-flow nodes appear inside
    their region's tree as whole-subtree markers.  Regions that differ only by
    identifier renaming contribute nothing.
    """
    r_i, r_c = _as_root(p_i), _as_root(p_c)
    cm = learning_cost_model(cf_weight)
    pool = MergeTreePool(problem_id=origin[1])
    if r_i == r_c:
        return pool
    alignment = control_flow_align(r_i, r_c)
    regions: list[tuple[Path, Path]] = [((), ())]
    regions.extend((ap.path_i, ap.path_c) for ap in alignment.aligned)
    for pi, pc in regions:
        node_i = node_at(r_i, pi)
        node_c = node_at(r_c, pc)
        rel_pairs = [
            (ap.path_i[len(pi):], ap.path_c[len(pc):])
            for ap in alignment.aligned
            if is_prefix(pi, ap.path_i)
            and ap.path_i != pi
            and is_prefix(pc, ap.path_c)
            and ap.path_c != pc
        ]
        f_i, f_c = flatten(node_i, node_c, rel_pairs)
        if f_i.root == f_c.root:
            continue
        if alpha_equivalent(f_i.root, f_c.root):
            continue  # pure renamings encode no repair knowledge
        result = ted(f_i.root, f_c.root, cm)
        fragment = merge(result.script, f_i, f_c)
        resolved = _resolve(fragment, f_i.placeholders, f_c.placeholders)
        if len(resolved) != 1:  # pragma: no cover - region roots stay plain
            raise AssertionError("region fragment must have a single root")
        final = _renumber(resolved[0])
        size = fragment_size(final, cm)
        if size > 0:
            pool.add(MergeTree(final, origin, size))
    return pool


def pool_merge(pools: Iterable[MergeTreePool]) -> MergeTreePool:
    """Aggregate pools from many pairs: structural dedup, summed frequencies."""
    pools = list(pools)
    problem_ids = {p.problem_id for p in pools if p.problem_id}
    if len(problem_ids) > 1:
        raise ValueError(f"cannot merge pools from different problems: {sorted(problem_ids)}")
    out = MergeTreePool(problem_id=problem_ids.pop() if problem_ids else "")
    for p in pools:
        for entry in p.entries:
            out.add(entry.tree, entry.frequency)
    return out


# ---------------------------------------------------------------------------
# Serialization


def node_to_json(node: Node) -> dict:
    out: dict = {"kind": node.kind.value, "label": node.label}
    if node.children:
        out["children"] = [node_to_json(c) for c in node.children]
    return out


def node_from_json(data: dict) -> Node:
    return Node(
        NodeKind(data["kind"]),
        data.get("label", ""),
        tuple(node_from_json(c) for c in data.get("children", ())),
    )


def merge_node_to_json(mn: MergeNode) -> dict:
    if mn.marker is Marker.PLAIN:
        return {
            "marker": "plain",
            "kind": mn.kind.value,
            "label": mn.label,
            "children": [merge_node_to_json(c) for c in mn.children],
        }
    if mn.marker is Marker.DELETED:
        return {"marker": "deleted", "node": node_to_json(mn.node)}
    if mn.marker is Marker.INSERTED:
        return {"marker": "inserted", "node": node_to_json(mn.node)}
    return {
        "marker": "mutated",
        "from": node_to_json(mn.from_node),
        "to": node_to_json(mn.to_node),
    }


def merge_node_from_json(data: dict) -> MergeNode:
    marker = data["marker"]
    if marker == "plain":
        return plain(
            NodeKind(data["kind"]),
            data.get("label", ""),
            [merge_node_from_json(c) for c in data.get("children", ())],
        )
    if marker == "deleted":
        return deleted(node_from_json(data["node"]))
    if marker == "inserted":
        return inserted(node_from_json(data["node"]))
    return mutated(node_from_json(data["from"]), node_from_json(data["to"]))


def pool_to_json(pool: MergeTreePool) -> dict:
    return {
        "version": pool.version,
        "problem_id": pool.problem_id,
        "trees": [
            {
                "fragment": merge_node_to_json(e.tree.root),
                "frequency": e.frequency,
                "transformation_size": e.tree.transformation_size,
                "origin": list(e.tree.origin),
            }
            for e in pool.entries
        ],
    }


def pool_from_json(data: dict) -> MergeTreePool:
    if data.get("version") != POOL_VERSION:
        raise ValueError(f"unsupported pool version {data.get('version')!r}")
    pool = MergeTreePool(problem_id=data.get("problem_id", ""))
    for t in data.get("trees", ()):
        tree = MergeTree(
            merge_node_from_json(t["fragment"]),
            tuple(t.get("origin", ("", ""))),
            t.get("transformation_size", 0),
        )
        pool.entries.append(PoolEntry(tree, t.get("frequency", 1)))
    return pool


def dump_pool(pool: MergeTreePool) -> str:
    return json.dumps(pool_to_json(pool), indent=2, sort_keys=True) + "\n"


def save_pool(pool: MergeTreePool, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_pool(pool))


def load_pool(path: str) -> MergeTreePool:
    with open(path, "r", encoding="utf-8") as f:
        return pool_from_json(json.load(f))
