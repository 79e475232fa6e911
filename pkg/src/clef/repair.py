"""Repair engine: match learned patterns against a target and validate fixes.

Matching embeds a control-flow-rooted target subtree into a pattern's
incorrect-side content: every target node and edge must appear in the pattern,
identifier names go through a consistent bijection, literals and types must
agree, and placeholder leaves act as same-kind wildcards that capture whole
target subtrees.  Applying a match rewrites the matched region to the
pattern's correct side; inserted identifiers with no rename image become holes
that variable alignment later fills with in-scope declared variables.
Candidates stream out in increasing repair size and are validated against the
judge until one is accepted or the budget runs out.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from .defuse import LIBRARY_CONSTANTS, LIBRARY_FUNCTIONS, def_use, type_family, visible_variables
from .distance import Num, ted, unit_cost_model
from .judge import CompilerConfig, JudgeInfrastructureError, Outcome, TestSuite, Verdict, judge
from .nodes import (
    Ast,
    Node,
    NodeKind,
    Path,
    control_flow_paths,
    identifier_names,
    iter_preorder_paths,
    node_at,
    paths_overlap,
    rename_identifiers,
    replace_many,
    structural_key,
)
from .patterns import (
    Marker,
    MergeNode,
    MergeTree,
    MergeTreePool,
    is_placeholder,
    placeholder_kind,
)

HOLE_PREFIX = "?hole:"


class StaleSiteError(ValueError):
    """The target changed since this site was matched."""


@dataclass(frozen=True)
class MatchSite:
    pattern_index: int
    pattern: MergeTree
    frequency: int
    target_path: Path
    target_subtree: Node
    rename: tuple[tuple[str, str], ...]  # pattern identifier -> target identifier


@dataclass(frozen=True)
class RepairCandidate:
    ast: Ast
    applied: tuple[MatchSite, ...]
    repair_cost: Num
    frequency: int = 0
    seq: int = 0

    @property
    def rank_key(self) -> tuple:
        return (len(self.applied), self.repair_cost, -self.frequency, self.seq)


@dataclass(frozen=True)
class Repaired:
    ast: Ast
    repair_cost: Num
    applied: tuple[MatchSite, ...]


@dataclass(frozen=True)
class Failure:
    candidates_tried: int
    best_verdict: Optional[Verdict]
    verdict_counts: dict[str, int] = field(default_factory=dict)


RepairResult = Union[Repaired, Failure]


# ---------------------------------------------------------------------------
# Matching machinery


class _MState:
    """Rename bijection plus wildcard bindings with an undo trail."""

    __slots__ = ("fwd", "bwd", "bindings", "trail")

    def __init__(self) -> None:
        self.fwd: dict[str, str] = {}
        self.bwd: dict[str, str] = {}
        self.bindings: dict[str, Node] = {}
        self.trail: list[tuple[str, str]] = []

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            table, key = self.trail.pop()
            if table == "f":
                del self.fwd[key]
            elif table == "b":
                del self.bwd[key]
            else:
                del self.bindings[key]

    def bind_ident(self, p: str, t: str) -> bool:
        if self.fwd.get(p, t) != t or self.bwd.get(t, p) != p:
            return False
        if p not in self.fwd:
            self.fwd[p] = t
            self.trail.append(("f", p))
        if t not in self.bwd:
            self.bwd[t] = p
            self.trail.append(("b", t))
        return True

    def bind_wild(self, label: str, subtree: Node) -> bool:
        existing = self.bindings.get(label)
        if existing is not None:
            return existing == subtree
        self.bindings[label] = subtree
        self.trail.append(("w", label))
        return True


_Builder = Callable[[], list[Node]]


@dataclass(frozen=True)
class _Ctx:
    known_names: frozenset[str]  # identifiers that stay verbatim when emitted


def _label_ok(p_kind: NodeKind, p_label: str, t: Node, st: _MState) -> bool:
    if p_kind is NodeKind.IDENTIFIER:
        return st.bind_ident(p_label, t.label)
    if p_kind is NodeKind.FUNC_DEF:
        pt, _, pn = p_label.rpartition(" ")
        tt, _, tn = t.label.rpartition(" ")
        return pt == tt and st.bind_ident(pn, tn)
    return p_label == t.label


def _match_plain(p: Node, t: Node, st: _MState) -> bool:
    """Embed target subtree ``t`` into pattern content ``p`` (may hold wildcards)."""
    if is_placeholder(p):
        return placeholder_kind(p) is t.kind and st.bind_wild(p.label, t)
    if p.kind is not t.kind or not _label_ok(p.kind, p.label, t, st):
        return False
    return _match_children(p.children, t.children, st)


def _match_children(p_kids: tuple[Node, ...], t_kids: tuple[Node, ...], st: _MState) -> bool:
    def go(ti: int, pi: int) -> bool:
        if ti == len(t_kids):
            return True
        if pi == len(p_kids):
            return False
        mark = st.mark()
        if _match_plain(p_kids[pi], t_kids[ti], st) and go(ti + 1, pi + 1):
            return True
        st.undo(mark)
        return go(ti, pi + 1)

    return go(0, 0)


def _materialize(p: Node, st: _MState, ctx: _Ctx) -> Node:
    """Instantiate correct-side pattern content in the target's namespace."""
    if is_placeholder(p):
        bound = st.bindings.get(p.label)
        if bound is None:
            raise ValueError(f"unbound pattern hole {p.label!r}")
        return bound
    if p.kind is NodeKind.IDENTIFIER:
        mapped = st.fwd.get(p.label)
        if mapped is not None:
            return Node(p.kind, mapped)
        if p.label in ctx.known_names:
            return p
        return Node(p.kind, HOLE_PREFIX + p.label)
    if p.kind is NodeKind.FUNC_DEF:
        pt, _, pn = p.label.rpartition(" ")
        name = st.fwd.get(pn, pn)
        return Node(p.kind, f"{pt} {name}", tuple(_materialize(c, st, ctx) for c in p.children))
    if not p.children:
        return p
    return p.with_children(tuple(_materialize(c, st, ctx) for c in p.children))


def _embed_fragment(mn: MergeNode, t: Node, st: _MState, ctx: _Ctx) -> Optional[_Builder]:
    """Match a Plain fragment node against a target node; defer output building."""
    if mn.kind is NodeKind.EMPTY and mn.label.startswith("@"):
        if placeholder_kind(Node(NodeKind.EMPTY, mn.label)) is not t.kind:
            return None
        if not st.bind_wild(mn.label, t):
            return None
        return lambda: [t]
    if mn.kind is not t.kind or not _label_ok(mn.kind, mn.label, t, st):
        return None
    items = mn.children
    t_kids = t.children

    def go(ti: int, ii: int) -> Optional[list[tuple[int, _Builder]]]:
        if ti == len(t_kids):
            return []
        if ii == len(items):
            return None
        item = items[ii]
        if item.marker is not Marker.INSERTED:
            mark = st.mark()
            sub = _embed_item(item, t_kids[ti], st, ctx)
            if sub is not None:
                rest = go(ti + 1, ii + 1)
                if rest is not None:
                    return [(ii, sub)] + rest
            st.undo(mark)
        return go(ti, ii + 1)

    assignment = go(0, 0)
    if assignment is None:
        return None
    matched: dict[int, _Builder] = dict(assignment)

    def build() -> list[Node]:
        out: list[Node] = []
        for ii, item in enumerate(items):
            if ii in matched:
                out.extend(matched[ii]())
            else:
                out.extend(_emit_unmatched(item, st, ctx))
        return [Node(t.kind, t.label, tuple(out))]

    return build


def _embed_item(item: MergeNode, t: Node, st: _MState, ctx: _Ctx) -> Optional[_Builder]:
    if item.marker is Marker.PLAIN:
        return _embed_fragment(item, t, st, ctx)
    if item.marker is Marker.DELETED:
        if _match_plain(item.node, t, st):
            return lambda: []
        return None
    if item.marker is Marker.MUTATED:
        if _match_plain(item.from_node, t, st):
            return lambda: [_materialize(item.to_node, st, ctx)]
        return None
    return None  # inserted content never consumes target nodes


def _emit_unmatched(item: MergeNode, st: _MState, ctx: _Ctx) -> list[Node]:
    if item.marker is Marker.INSERTED:
        return [_materialize(item.node, st, ctx)]
    if item.marker is Marker.MUTATED:
        return [_materialize(item.to_node, st, ctx)]
    return []  # plain context / deletions of absent content


def _embed_region(root: MergeNode, t: Node, st: _MState, ctx: _Ctx) -> Optional[_Builder]:
    if root.marker is Marker.PLAIN:
        return _embed_fragment(root, t, st, ctx)
    if root.marker is Marker.MUTATED:
        if _match_plain(root.from_node, t, st):
            return lambda: [_materialize(root.to_node, st, ctx)]
        return None
    return None


def _target_ctx(target: Ast) -> _Ctx:
    known = set(LIBRARY_FUNCTIONS) | set(LIBRARY_CONSTANTS)
    root = target.root
    tops = root.children if root.kind is NodeKind.BLOCK else (root,)
    for n in tops:
        if n.kind is NodeKind.FUNC_DEF:
            known.add(n.label.split()[-1])
    return _Ctx(frozenset(known))


# ---------------------------------------------------------------------------
# Public matching / application


def find_matches(target: Ast, pool: MergeTreePool) -> list[MatchSite]:
    """Every (control-flow subtree, pattern) pair where containment holds."""
    ctx = _target_ctx(target)
    cf_sites = control_flow_paths(target.root)
    out: list[MatchSite] = []
    for idx, entry in enumerate(pool):
        kind = entry.tree.region_kind()
        if kind in (NodeKind.IF, NodeKind.WHILE, NodeKind.FOR, NodeKind.CALL):
            spots = [(p, n) for p, n in cf_sites if n.kind is kind]
        else:
            spots = [((), target.root)]
        for path, node in spots:
            st = _MState()
            if _embed_region(entry.tree.root, node, st, ctx) is not None:
                out.append(
                    MatchSite(
                        pattern_index=idx,
                        pattern=entry.tree,
                        frequency=entry.frequency,
                        target_path=path,
                        target_subtree=node,
                        rename=tuple(sorted(st.fwd.items())),
                    )
                )
    return out


def apply_pattern(target: Ast, site: MatchSite) -> Ast:
    """Rewrite the matched subtree to the pattern's correct-side readout."""
    current = node_at(target.root, site.target_path)
    if current != site.target_subtree:
        raise StaleSiteError(f"target changed under path {site.target_path}")
    ctx = _target_ctx(target)
    st = _MState()
    builder = _embed_region(site.pattern.root, current, st, ctx)
    if builder is None:  # pragma: no cover - sites always re-embed
        raise StaleSiteError("site no longer matches its pattern")
    out = builder()
    if len(out) != 1:
        raise ValueError("pattern application must produce a single subtree")
    new_subtree = _settle_inserted_decls(out[0], target)
    new_root = replace_many(target.root, {site.target_path: new_subtree})
    return target.with_root(new_root)


def _settle_inserted_decls(subtree: Node, target: Ast) -> Node:
    """Give locally declared hole names a fresh concrete identifier.

    A hole that is itself declared by inserted content is defined, not
    undefined; it just needs a name that does not collide with the target's.
    """
    declared_holes = {
        n.children[0].label
        for n in _walk(subtree)
        if n.kind is NodeKind.DECL and n.children[0].label.startswith(HOLE_PREFIX)
    }
    if not declared_holes:
        return subtree
    taken = identifier_names(target.root) | identifier_names(subtree)
    mapping: dict[str, str] = {}
    for hole in sorted(declared_holes):
        base = hole[len(HOLE_PREFIX):]
        name = base
        k = 2
        while name in taken:
            name = f"{base}_{k}"
            k += 1
        taken.add(name)
        mapping[hole] = name
    return rename_identifiers(subtree, mapping)


def _walk(node: Node):
    yield node
    for c in node.children:
        yield from _walk(c)


# ---------------------------------------------------------------------------
# Variable alignment and spurious filtering


def hole_names(tree: Ast | Node) -> set[str]:
    root = tree.root if isinstance(tree, Ast) else tree
    return {
        n.label for n in _walk(root)
        if n.kind is NodeKind.IDENTIFIER and n.label.startswith(HOLE_PREFIX)
    }


_INT_ONLY_BINOPS = {"%", "<<", ">>", "&", "|", "^"}


def align_variables(candidate: Ast, cap: int = 64) -> list[Ast]:
    """One candidate per injective assignment of holes to in-scope variables.

    Assignments respect declaration order and a light type-compatibility
    check: holes used where C requires an integer only accept integer-family
    variables, and array/scalar usage must agree.
    """
    root = candidate.root
    occurrences: dict[str, list[Path]] = {}
    for path, n in iter_preorder_paths(root):
        if n.kind is NodeKind.IDENTIFIER and n.label.startswith(HOLE_PREFIX):
            occurrences.setdefault(n.label, []).append(path)
    if not occurrences:
        return [candidate]

    per_hole: list[tuple[str, list[str]]] = []
    for hole in sorted(occurrences):
        paths = occurrences[hole]
        needs_int = False
        needs_array = False
        for p in paths:
            parent = node_at(root, p[:-1]) if p else None
            if parent is None:
                continue
            if parent.kind is NodeKind.BIN_OP:
                if parent.label in _INT_ONLY_BINOPS:
                    needs_int = True
                elif parent.label == "[]":
                    if p[-1] == 0:
                        needs_array = True
                    else:
                        needs_int = True
            elif parent.kind is NodeKind.UN_OP and parent.label == "~":
                needs_int = True
        options: Optional[list[str]] = None
        for p in paths:
            visible = visible_variables(root, p)
            names = []
            for v in visible:
                fam = type_family(v.ctype)
                if needs_array != v.is_array:
                    continue
                if needs_int and fam != "int":
                    continue
                names.append(v.name)
            if options is None:
                options = names
            else:
                keep = set(names)
                options = [n for n in options if n in keep]
        per_hole.append((hole, options or []))
        if not (options or []):
            return []

    out: list[Ast] = []
    holes = [h for h, _ in per_hole]
    for combo in itertools.product(*(opts for _, opts in per_hole)):
        if len(set(combo)) != len(combo):
            continue  # injective assignments only
        mapping = dict(zip(holes, combo))
        out.append(candidate.with_root(rename_identifiers(root, mapping)))
        if len(out) >= cap:
            break
    return out


def filter_spurious(candidates: list[Ast], target: Optional[Ast] = None) -> list[Ast]:
    """Drop candidates with undeclared uses or newly unused declarations."""
    baseline_unused = def_use(target).unused_names if target is not None else set()
    kept: list[Ast] = []
    for c in candidates:
        report = def_use(c)
        if report.undeclared_uses:
            continue
        if any(name not in baseline_unused for name in report.unused_names):
            continue
        kept.append(c)
    return kept


# ---------------------------------------------------------------------------
# Candidate enumeration


@dataclass
class _Expansion:
    site: MatchSite
    variants: list[Ast]
    region_after: Node
    cost: Num


def _expand_site(target: Ast, site: MatchSite, var_align_cap: int) -> Optional[_Expansion]:
    rewritten = apply_pattern(target, site)
    variants = filter_spurious(align_variables(rewritten, var_align_cap), target)
    if not variants:
        return None
    region_after = node_at(variants[0].root, site.target_path)
    cost = ted(site.target_subtree, region_after, unit_cost_model()).distance
    return _Expansion(site, variants, region_after, cost)


def enumerate_candidates(
    target: Ast,
    pool: MergeTreePool,
    budget: int,
    var_align_cap: int = 64,
    combo_arity_cap: int = 3,
    combo_site_cap: int = 64,
) -> Iterator[RepairCandidate]:
    """Stream candidates: the unmodified target, then singles by rank, then
    disjoint combinations of increasing size, stopping at ``budget`` items.

    Every emitted candidate already survived spurious filtering, and
    structural duplicates are suppressed.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    emitted = 0
    seen: set = {structural_key(target.root)}
    yield RepairCandidate(target, (), 0, seq=0)
    emitted += 1
    if emitted >= budget:
        return

    sites = find_matches(target, pool)
    expansions: list[_Expansion] = []
    for site in sites:
        exp = _expand_site(target, site, var_align_cap)
        if exp is not None:
            expansions.append(exp)
    expansions.sort(
        key=lambda e: (e.cost, -e.site.frequency, e.site.pattern_index, e.site.target_path)
    )

    seq = 1
    for exp in expansions:
        for variant in exp.variants:
            key = structural_key(variant.root)
            if key in seen:
                continue
            seen.add(key)
            yield RepairCandidate(
                variant, (exp.site,), exp.cost, frequency=exp.site.frequency, seq=seq
            )
            seq += 1
            emitted += 1
            if emitted >= budget:
                return

    base = expansions[:combo_site_cap]
    for arity in range(2, combo_arity_cap + 1):
        combos = []
        for combo in itertools.combinations(range(len(base)), arity):
            chosen = [base[i] for i in combo]
            paths = [e.site.target_path for e in chosen]
            if any(
                paths_overlap(paths[i], paths[j])
                for i in range(len(paths))
                for j in range(i + 1, len(paths))
            ):
                continue
            combos.append(chosen)
        combos.sort(
            key=lambda chosen: (
                sum(e.cost for e in chosen),
                -sum(e.site.frequency for e in chosen),
                tuple(e.site.pattern_index for e in chosen),
            )
        )
        for chosen in combos:
            new_root = replace_many(
                target.root, {e.site.target_path: e.region_after for e in chosen}
            )
            combined = target.with_root(new_root)
            if structural_key(combined.root) in seen:
                continue
            if not filter_spurious([combined], target):
                continue
            seen.add(structural_key(combined.root))
            yield RepairCandidate(
                combined,
                tuple(e.site for e in chosen),
                sum(e.cost for e in chosen),
                frequency=sum(e.site.frequency for e in chosen),
                seq=seq,
            )
            seq += 1
            emitted += 1
            if emitted >= budget:
                return


# ---------------------------------------------------------------------------
# Validation loop


def _passed_tests(v: Verdict) -> int:
    if v.outcome is Outcome.COMPILE_TIME_ERROR:
        return -1
    if v.first_failed_test is None:
        return 1 << 30
    return v.first_failed_test - 1


def repair(
    target: Ast,
    pool: MergeTreePool,
    suite: TestSuite,
    limits=None,
    budget: int = 1000,
    cc: Optional[CompilerConfig] = None,
    var_align_cap: int = 64,
    combo_arity_cap: int = 3,
) -> RepairResult:
    """Judge candidates in stream order; return the first accepted repair.

    ``limits`` overrides the suite's resource limits when given.  There is no
    wall-clock limit; only the candidate budget bounds the search.  Judge
    infrastructure faults propagate as exceptions, never as a Failure.
    """
    from .printer import to_source

    if limits is not None:
        suite = TestSuite(suite.cases, limits)
    tried = 0
    best: Optional[Verdict] = None
    counts: dict[str, int] = {}
    for cand in enumerate_candidates(
        target, pool, budget, var_align_cap=var_align_cap, combo_arity_cap=combo_arity_cap
    ):
        verdict = judge(to_source(cand.ast), suite, cc)
        tried += 1
        if verdict.outcome is Outcome.ACCEPTED:
            exact = ted(target.root, cand.ast.root, unit_cost_model()).distance
            return Repaired(cand.ast, exact, cand.applied)
        counts[verdict.outcome.code] = counts.get(verdict.outcome.code, 0) + 1
        if best is None or _passed_tests(verdict) > _passed_tests(best):
            best = verdict
    return Failure(tried, best, counts)
