"""Weighted tree edit distance between ordered labeled trees.

Implements the Zhang-Shasha dynamic program (keyroots + forest distances,
O(m^2 n^2) worst case) together with an optimal edit-script extraction.  The
cost model prices inserts, deletes and relabels per node and can weight edits
that touch control-flow nodes more heavily than other changes.

The returned script is replayable: :func:`apply_script` executes it against
the first tree and produces the second, which the test suite exercises as the
correctness oracle for the mapping extraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .nodes import Node, NodeKind

Num = Union[int, float]


@dataclass(frozen=True)
class CostModel:
    insert_cost: Callable[[Node], Num]
    delete_cost: Callable[[Node], Num]
    relabel_cost: Callable[[Node, Node], Num]
    cf_weight: Num = 1
    name: str = "unit"


def unit_cost_model() -> CostModel:
    """Every insert/delete costs 1; relabel costs 1 unless kind+label match."""
    return CostModel(
        insert_cost=lambda n: 1,
        delete_cost=lambda n: 1,
        relabel_cost=lambda a, b: 0 if (a.kind is b.kind and a.label == b.label) else 1,
        cf_weight=1,
        name="unit",
    )


def learning_cost_model(cf_weight: Num = 10) -> CostModel:
    """Unit model, except edits touching a control-flow node cost ``cf_weight``."""
    if cf_weight < 1:
        raise ValueError(f"cf_weight must be >= 1, got {cf_weight}")

    def node_cost(n: Node) -> Num:
        return cf_weight if n.is_control_flow() else 1

    def relabel(a: Node, b: Node) -> Num:
        if a.kind is b.kind and a.label == b.label:
            return 0
        return cf_weight if (a.is_control_flow() or b.is_control_flow()) else 1

    return CostModel(node_cost, node_cost, relabel, cf_weight, name=f"learning(cf={cf_weight})")


# ---------------------------------------------------------------------------
# Edit scripts


@dataclass(frozen=True, slots=True)
class Relabel:
    target: int  # preorder id in the first tree
    kind: NodeKind
    label: str


@dataclass(frozen=True, slots=True)
class Delete:
    target: int  # preorder id in the first tree; children splice into parent


@dataclass(frozen=True, slots=True)
class Insert:
    new_id: int
    kind: NodeKind
    label: str
    parent: int  # id of an existing or previously inserted node; -1 = above root
    index: int  # position among the parent's current children
    adopt: int  # how many existing children starting at index move under the new node


Edit = Union[Relabel, Delete, Insert]


@dataclass(frozen=True)
class EditScript:
    edits: tuple[Edit, ...]
    total_cost: Num
    #: matched (first-tree preorder id, second-tree preorder id) pairs,
    #: including relabeled ones.
    mapping: tuple[tuple[int, int], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.edits)


@dataclass(frozen=True)
class TedResult:
    distance: Num
    script: EditScript


class _Annotated:
    """Postorder node array with leftmost-leaf descendants and keyroots."""

    __slots__ = ("nodes", "lmds", "keyroots", "pre_of_post", "post_of_pre")

    def __init__(self, root: Node):
        nodes: list[Node] = []
        lmds: list[int] = []
        pre_of_post: list[int] = []

        def walk(n: Node, pre_id: int) -> tuple[int, int]:
            # returns (lmd, next free preorder id)
            next_pre = pre_id + 1
            first_leaf = -1
            for c in n.children:
                child_lmd, next_pre = walk(c, next_pre)
                if first_leaf < 0:
                    first_leaf = child_lmd
            my_lmd = first_leaf if first_leaf >= 0 else len(nodes)
            nodes.append(n)
            lmds.append(my_lmd)
            pre_of_post.append(pre_id)
            return my_lmd, next_pre

        walk(root, 0)
        self.nodes = nodes
        self.lmds = lmds
        self.pre_of_post = pre_of_post
        self.post_of_pre = [0] * len(nodes)
        for post, pre in enumerate(pre_of_post):
            self.post_of_pre[pre] = post
        last_with_lmd: dict[int, int] = {}
        for i, l in enumerate(lmds):
            last_with_lmd[l] = i
        self.keyroots = sorted(last_with_lmd.values())


def ted(a: Node, b: Node, cm: Optional[CostModel] = None) -> TedResult:
    """Minimum-cost edit distance and an optimal script turning ``a`` into ``b``."""
    if cm is None:
        cm = unit_cost_model()
    A, B = _Annotated(a), _Annotated(b)
    na, nb = len(A.nodes), len(B.nodes)
    DEL = [cm.delete_cost(n) for n in A.nodes]
    INS = [cm.insert_cost(n) for n in B.nodes]
    REL = [[cm.relabel_cost(x, y) for y in B.nodes] for x in A.nodes]
    TD: list[list[Num]] = [[0] * nb for _ in range(na)]
    al, bl = A.lmds, B.lmds

    def forest_dists(i: int, j: int, record: bool) -> list[list[Num]]:
        m = i - al[i] + 2
        n = j - bl[j] + 2
        ioff = al[i] - 1
        joff = bl[j] - 1
        fd: list[list[Num]] = [[0] * n for _ in range(m)]
        for x in range(1, m):
            fd[x][0] = fd[x - 1][0] + DEL[x + ioff]
        row0 = fd[0]
        for y in range(1, n):
            row0[y] = row0[y - 1] + INS[y + joff]
        ali, blj = al[i], bl[j]
        for x in range(1, m):
            ax = x + ioff
            rel_row = REL[ax]
            del_x = DEL[ax]
            fx, fx1 = fd[x], fd[x - 1]
            spine_x = al[ax] == ali
            td_row = TD[ax]
            for y in range(1, n):
                by = y + joff
                if spine_x and bl[by] == blj:
                    d = fx1[y] + del_x
                    i2 = fx[y - 1] + INS[by]
                    if i2 < d:
                        d = i2
                    r = fx1[y - 1] + rel_row[by]
                    if r < d:
                        d = r
                    fx[y] = d
                    if record:
                        td_row[by] = d
                else:
                    p = al[ax] - 1 - ioff
                    q = bl[by] - 1 - joff
                    d = fx1[y] + del_x
                    i2 = fx[y - 1] + INS[by]
                    if i2 < d:
                        d = i2
                    c = fd[p][q] + td_row[by]
                    if c < d:
                        d = c
                    fx[y] = d
        return fd

    for i in A.keyroots:
        for j in B.keyroots:
            forest_dists(i, j, record=True)

    distance = TD[na - 1][nb - 1]
    mapping_post = _extract_mapping(A, B, TD, DEL, INS, REL, forest_dists)
    mapping_pre = tuple(
        sorted((A.pre_of_post[ai], B.pre_of_post[bi]) for ai, bi in mapping_post)
    )
    script = _build_script(a, b, mapping_pre, cm)
    if script.total_cost != distance:
        raise AssertionError(
            f"script cost {script.total_cost} disagrees with distance {distance}"
        )
    return TedResult(distance, script)


def _extract_mapping(A, B, TD, DEL, INS, REL, forest_dists) -> list[tuple[int, int]]:
    """Walk the DP tables back to one optimal node mapping (postorder ids).

    Tie order is fixed (relabel, delete, insert, subtree composition) so the
    returned script is deterministic.
    """
    al, bl = A.lmds, B.lmds
    mapping: list[tuple[int, int]] = []
    stack = [(len(A.nodes) - 1, len(B.nodes) - 1)]
    while stack:
        i, j = stack.pop()
        fd = forest_dists(i, j, record=False)
        ioff = al[i] - 1
        joff = bl[j] - 1
        x = i - al[i] + 1
        y = j - bl[j] + 1
        while x > 0 or y > 0:
            ax = x + ioff
            by = y + joff
            cur = fd[x][y]
            if x > 0 and y > 0 and al[ax] == al[i] and bl[by] == bl[j]:
                if cur == fd[x - 1][y - 1] + REL[ax][by]:
                    mapping.append((ax, by))
                    x -= 1
                    y -= 1
                elif cur == fd[x - 1][y] + DEL[ax]:
                    x -= 1
                elif cur == fd[x][y - 1] + INS[by]:
                    y -= 1
                else:  # pragma: no cover - DP invariant
                    raise AssertionError("inconsistent forest distances")
            else:
                if x > 0 and cur == fd[x - 1][y] + DEL[ax]:
                    x -= 1
                elif y > 0 and cur == fd[x][y - 1] + INS[by]:
                    y -= 1
                else:
                    p = al[ax] - 1 - ioff
                    q = bl[by] - 1 - joff
                    if x == 0 or y == 0 or cur != fd[p][q] + TD[ax][by]:  # pragma: no cover
                        raise AssertionError("inconsistent forest distances")
                    stack.append((ax, by))
                    x, y = p, q
    return mapping


# ---------------------------------------------------------------------------
# Script construction and replay


class _W:
    """Mutable working node used while building and replaying scripts."""

    __slots__ = ("id", "kind", "label", "children", "parent")

    def __init__(self, id: int, kind: NodeKind, label: str):
        self.id = id
        self.kind = kind
        self.label = label
        self.children: list["_W"] = []
        self.parent: Optional["_W"] = None

    def attach(self, children: list["_W"]) -> None:
        self.children = children
        for c in children:
            c.parent = self


def _work_tree(root: Node) -> tuple[_W, dict[int, _W]]:
    """Copy ``root`` into working nodes with preorder ids, under a -1 super-root."""
    index: dict[int, _W] = {}
    counter = [0]

    def build(n: Node) -> _W:
        w = _W(counter[0], n.kind, n.label)
        index[w.id] = w
        counter[0] += 1
        w.attach([build(c) for c in n.children])
        return w

    top = _W(-1, NodeKind.BLOCK, "<virtual>")
    index[-1] = top
    top.attach([build(root)])
    return top, index


def _freeze(w: _W) -> Node:
    return Node(w.kind, w.label, tuple(_freeze(c) for c in w.children))


def _splice_out(w: _W) -> None:
    parent = w.parent
    i = parent.children.index(w)
    for c in w.children:
        c.parent = parent
    parent.children[i : i + 1] = w.children


def _preorder_index(root: Node) -> list[Node]:
    out: list[Node] = []

    def walk(n: Node) -> None:
        out.append(n)
        for c in n.children:
            walk(c)

    walk(root)
    return out


def _build_script(
    a: Node, b: Node, mapping_pre: tuple[tuple[int, int], ...], cm: CostModel
) -> EditScript:
    a_nodes = _preorder_index(a)
    b_nodes = _preorder_index(b)
    b_parent: dict[int, int] = {}
    b_size: dict[int, int] = {}

    def sizes(pre: int) -> int:
        n = b_nodes[pre]
        total = 1
        child = pre + 1
        for c in n.children:
            b_parent[child] = pre
            sz = sizes(child)
            total += sz
            child += sz
        b_size[pre] = total
        return total

    sizes(0)

    a_to_b = dict(mapping_pre)
    b_to_a = {bi: ai for ai, bi in mapping_pre}

    top, index = _work_tree(a)
    edits: list[Edit] = []
    cost: Num = 0

    # Track which b node each surviving working node currently stands for.
    b_of_w: dict[_W, int] = {}

    # 1. relabels, in a-preorder
    for ai, bi in mapping_pre:
        bn = b_nodes[bi]
        w = index[ai]
        b_of_w[w] = bi
        if w.kind is not bn.kind or w.label != bn.label:
            edits.append(Relabel(ai, bn.kind, bn.label))
            cost += cm.relabel_cost(a_nodes[ai], bn)
            w.kind = bn.kind
            w.label = bn.label

    # 2. deletions of unmapped a nodes, deepest-right first
    for ai in range(len(a_nodes) - 1, -1, -1):
        if ai not in a_to_b:
            edits.append(Delete(ai))
            cost += cm.delete_cost(a_nodes[ai])
            _splice_out(index[ai])

    # 3. insertions of unmapped b nodes, in b-preorder
    next_id = len(a_nodes)
    realized: dict[int, _W] = {bi: index[ai] for ai, bi in mapping_pre}
    for bi in range(len(b_nodes)):
        if bi in b_to_a:
            continue
        bn = b_nodes[bi]
        parent_b = b_parent.get(bi)
        pw = top if parent_b is None else realized[parent_b]
        lo, hi = bi, bi + b_size[bi]  # b-preorder range of bi's descendants
        start = None
        count = 0
        insert_at = len(pw.children)
        for idx, c in enumerate(pw.children):
            cb = b_of_w[c]
            if lo < cb < hi:
                if start is None:
                    start = idx
                count += 1
            elif start is not None:
                break
            elif cb > bi:
                insert_at = idx
                break
        if start is None:
            start = insert_at
        edits.append(Insert(next_id, bn.kind, bn.label, pw.id, start, count))
        cost += cm.insert_cost(bn)
        w = _W(next_id, bn.kind, bn.label)
        index[next_id] = w
        adopted = pw.children[start : start + count]
        pw.children[start : start + count] = [w]
        w.parent = pw
        w.attach(adopted)
        realized[bi] = w
        b_of_w[w] = bi
        next_id += 1

    if len(top.children) != 1:  # pragma: no cover - mapping invariant
        raise AssertionError("script did not produce a single root")
    return EditScript(tuple(edits), cost, mapping_pre)


def apply_script(a: Node, script: EditScript) -> Node:
    """Replay ``script`` against ``a`` and return the resulting tree."""
    top, index = _work_tree(a)
    for edit in script.edits:
        if isinstance(edit, Relabel):
            w = index[edit.target]
            w.kind = edit.kind
            w.label = edit.label
        elif isinstance(edit, Delete):
            _splice_out(index[edit.target])
        else:
            pw = index[edit.parent]
            w = _W(edit.new_id, edit.kind, edit.label)
            index[edit.new_id] = w
            adopted = pw.children[edit.index : edit.index + edit.adopt]
            pw.children[edit.index : edit.index + edit.adopt] = [w]
            w.parent = pw
            w.attach(adopted)
    if len(top.children) != 1:
        raise ValueError("script application did not yield a single root")
    return _freeze(top.children[0])
