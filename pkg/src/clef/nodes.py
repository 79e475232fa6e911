"""Ordered labeled syntax trees for a competitive-programming subset of C.

A program is an :class:`Ast` whose nodes are immutable :class:`Node` values.
Structural equality is kind + label + children; source spans are carried for
error reporting only and never participate in comparisons.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional


class NodeKind(str, enum.Enum):
    IF = "If"
    WHILE = "While"
    FOR = "For"
    CALL = "Call"
    FUNC_DEF = "FuncDef"
    BLOCK = "Block"
    ASSIGN = "Assign"
    RETURN = "Return"
    DECL = "Decl"
    BIN_OP = "BinOp"
    UN_OP = "UnOp"
    IDENTIFIER = "Identifier"
    LITERAL = "Literal"
    BREAK = "Break"
    CONTINUE = "Continue"
    EMPTY = "Empty"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


#: The four kinds treated as control flow by alignment, flattening and matching.
CONTROL_FLOW_KINDS = frozenset(
    {NodeKind.IF, NodeKind.WHILE, NodeKind.FOR, NodeKind.CALL}
)


@dataclass(frozen=True, slots=True)
class Span:
    line: int
    col: int


@dataclass(frozen=True, slots=True)
class Node:
    """One tree node.

    ``label`` holds canonical token text: the operator for BinOp/UnOp/Assign,
    the canonical literal spelling for Literal, the name for Identifier, the
    declared type (with a ``[]`` marker for arrays) for Decl, and
    ``"<type> <name>"`` for FuncDef.  Structural kinds (If, Block, ...) use "".
    """

    kind: NodeKind
    label: str = ""
    children: tuple["Node", ...] = ()
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def with_children(self, children: tuple["Node", ...]) -> "Node":
        return Node(self.kind, self.label, children, self.span)

    def with_label(self, label: str) -> "Node":
        return Node(self.kind, label, self.children, self.span)

    def is_control_flow(self) -> bool:
        return self.kind in CONTROL_FLOW_KINDS


@dataclass(frozen=True, slots=True)
class Ast:
    """A parsed program: tree root plus non-tree preamble metadata.

    ``preamble`` keeps ``#include`` lines verbatim, in source order; they are
    re-emitted first when the tree is printed back to C.
    """

    root: Node
    preamble: tuple[str, ...] = ()
    source_digest: Optional[str] = None

    def with_root(self, root: Node) -> "Ast":
        return Ast(root, self.preamble, self.source_digest)


#: Address of a node: child indices from the root.
Path = tuple[int, ...]


def iter_preorder(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def iter_preorder_paths(node: Node, base: Path = ()) -> Iterator[tuple[Path, Node]]:
    stack: list[tuple[Path, Node]] = [(base, node)]
    while stack:
        path, n = stack.pop()
        yield path, n
        for i in range(len(n.children) - 1, -1, -1):
            stack.append((path + (i,), n.children[i]))


def node_count(tree: Ast | Node) -> int:
    root = tree.root if isinstance(tree, Ast) else tree
    return sum(1 for _ in iter_preorder(root))


def control_flow_nodes(tree: Ast | Node) -> list[Node]:
    """All If/While/For/Call nodes in preorder."""
    root = tree.root if isinstance(tree, Ast) else tree
    return [n for n in iter_preorder(root) if n.is_control_flow()]


def control_flow_paths(tree: Ast | Node) -> list[tuple[Path, Node]]:
    root = tree.root if isinstance(tree, Ast) else tree
    return [(p, n) for p, n in iter_preorder_paths(root) if n.is_control_flow()]


def node_at(root: Node, path: Path) -> Node:
    n = root
    for i in path:
        n = n.children[i]
    return n


def replace_at(root: Node, path: Path, new: Node) -> Node:
    if not path:
        return new
    i = path[0]
    kids = list(root.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return root.with_children(tuple(kids))


def replace_many(root: Node, replacements: dict[Path, Node]) -> Node:
    """Replace several disjoint subtrees in one rebuild.

    Paths must not be prefixes of one another.
    """
    out = root
    for path in sorted(replacements, key=len, reverse=True):
        out = replace_at(out, path, replacements[path])
    return out


def is_prefix(a: Path, b: Path) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def paths_overlap(a: Path, b: Path) -> bool:
    return is_prefix(a, b) or is_prefix(b, a)


def map_labels(node: Node, fn: Callable[[Node], str]) -> Node:
    new_children = tuple(map_labels(c, fn) for c in node.children)
    new_label = fn(node)
    if new_label == node.label and new_children == node.children:
        return node
    return Node(node.kind, new_label, new_children, node.span)


def rename_identifiers(node: Node, mapping: dict[str, str]) -> Node:
    """Rewrite Identifier labels through ``mapping``; other labels untouched."""

    def fn(n: Node) -> str:
        if n.kind is NodeKind.IDENTIFIER:
            return mapping.get(n.label, n.label)
        return n.label

    return map_labels(node, fn)


def identifier_names(node: Node) -> set[str]:
    return {n.label for n in iter_preorder(node) if n.kind is NodeKind.IDENTIFIER}


def structural_key(node: Node) -> tuple:
    """Hashable recursive key; equal iff trees are structurally equal."""
    return (node.kind.value, node.label, tuple(structural_key(c) for c in node.children))
