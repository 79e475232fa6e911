"""Variable definition/use analysis over program trees.

Used by the repair pipeline to throw away spurious candidates (uses of
undeclared variables, transformations that orphan a local) and by variable
alignment to enumerate what is in scope at a hole.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import Ast, Node, NodeKind, Path

#: Library identifiers that look like variables but come from standard headers.
LIBRARY_CONSTANTS = {
    "EOF", "NULL", "RAND_MAX", "INT_MAX", "INT_MIN", "LONG_MAX", "LONG_MIN",
    "LLONG_MAX", "LLONG_MIN", "UINT_MAX", "ULONG_MAX", "ULLONG_MAX",
    "CHAR_MAX", "CHAR_MIN", "M_PI", "stdin", "stdout", "stderr",
}

#: Standard-library functions competition submissions commonly call.
LIBRARY_FUNCTIONS = {
    "printf", "scanf", "fprintf", "fscanf", "sprintf", "sscanf",
    "getchar", "putchar", "puts", "gets", "fgets", "fflush",
    "abs", "labs", "llabs", "atoi", "atol", "atoll",
    "malloc", "calloc", "realloc", "free", "exit",
    "strlen", "strcmp", "strncmp", "strcpy", "strncpy", "strcat", "memset", "memcpy",
    "sqrt", "pow", "floor", "ceil", "fabs", "log", "log2", "log10", "exp",
    "sin", "cos", "tan", "round", "fmod", "qsort", "rand", "srand", "time",
}

_INT_TYPES = {"char", "short", "int", "long", "long long", "size_t"}
_FLOAT_TYPES = {"float", "double", "long double"}


def type_family(ctype: str) -> str:
    """'int', 'float' or 'other' for a canonical declared type."""
    base = ctype.removesuffix("[]")
    for prefix in ("unsigned ", "signed "):
        if base.startswith(prefix):
            base = base[len(prefix):]
    if base in ("unsigned", "signed"):
        base = "int"
    if base in _INT_TYPES:
        return "int"
    if base in _FLOAT_TYPES:
        return "float"
    return "other"


@dataclass(frozen=True, slots=True)
class VarInfo:
    name: str
    ctype: str
    decl_path: Path

    @property
    def is_array(self) -> bool:
        return self.ctype.endswith("[]")


@dataclass(frozen=True)
class DefUseReport:
    undeclared_uses: tuple[tuple[str, Path], ...]
    unused_decls: tuple[tuple[str, Path], ...]

    @property
    def undeclared_names(self) -> set[str]:
        return {name for name, _ in self.undeclared_uses}

    @property
    def unused_names(self) -> set[str]:
        return {name for name, _ in self.unused_decls}


def def_use(tree: Ast | Node) -> DefUseReport:
    root = tree.root if isinstance(tree, Ast) else tree
    functions: set[str] = set()
    for n in _toplevel(root):
        if n.kind is NodeKind.FUNC_DEF:
            functions.add(n.label.split()[-1])

    undeclared: list[tuple[str, Path]] = []
    use_counts: dict[Path, int] = {}
    decl_names: dict[Path, str] = {}
    param_paths: set[Path] = set()
    scopes: list[dict[str, Path]] = [{}]

    def lookup(name: str) -> Path | None:
        for scope in reversed(scopes):
            if name in scope:
                return scope[name]
        return None

    def visit(node: Node, path: Path, is_param: bool = False) -> None:
        kind = node.kind
        if kind is NodeKind.DECL:
            for i, c in enumerate(node.children[1:], start=1):
                visit(c, path + (i,))
            name = node.children[0].label
            scopes[-1][name] = path
            decl_names[path] = name
            use_counts.setdefault(path, 0)
            if is_param:
                param_paths.add(path)
            return
        if kind is NodeKind.FUNC_DEF:
            scopes.append({})
            *params, body = node.children
            for i, p in enumerate(params):
                visit(p, path + (i,), is_param=True)
            visit(body, path + (len(params),))
            scopes.pop()
            return
        if kind in (NodeKind.BLOCK, NodeKind.FOR):
            scopes.append({})
            for i, c in enumerate(node.children):
                visit(c, path + (i,))
            scopes.pop()
            return
        if kind is NodeKind.CALL:
            callee = node.children[0]
            if callee.kind is not NodeKind.IDENTIFIER:
                visit(callee, path + (0,))
            # callee names resolve through headers; not a variable use
            for i, c in enumerate(node.children[1:], start=1):
                visit(c, path + (i,))
            return
        if kind is NodeKind.IDENTIFIER:
            decl = lookup(node.label)
            if decl is not None:
                use_counts[decl] += 1
            elif node.label not in functions and node.label not in LIBRARY_CONSTANTS:
                undeclared.append((node.label, path))
            return
        for i, c in enumerate(node.children):
            visit(c, path + (i,))

    visit(root, ())

    unused = tuple(
        (decl_names[p], p)
        for p in sorted(decl_names)
        if use_counts[p] == 0 and p not in param_paths
    )
    return DefUseReport(tuple(undeclared), unused)


def _toplevel(root: Node) -> tuple[Node, ...]:
    if root.kind is NodeKind.BLOCK:
        return root.children
    return (root,)


def visible_variables(root: Node, target_path: Path) -> list[VarInfo]:
    """Declared variables in scope at ``target_path``, in declaration order.

    Includes globals declared earlier, parameters of the enclosing function,
    and locals declared before the target in each enclosing block (or in an
    enclosing for-initializer).
    """
    out: list[VarInfo] = []
    node = root
    walked: Path = ()
    for idx in target_path:
        if node.kind is NodeKind.BLOCK:
            for i in range(idx):
                c = node.children[i]
                if c.kind is NodeKind.DECL:
                    out.append(_varinfo(c, walked + (i,)))
        elif node.kind is NodeKind.FUNC_DEF:
            nparams = len(node.children) - 1
            upto = min(idx, nparams)
            for i in range(upto):
                out.append(_varinfo(node.children[i], walked + (i,)))
        elif node.kind is NodeKind.FOR:
            if idx >= 1 and node.children[0].kind is NodeKind.DECL:
                out.append(_varinfo(node.children[0], walked + (0,)))
        node = node.children[idx]
        walked += (idx,)
    # Deduplicate shadowed names, innermost declaration wins.
    seen: dict[str, int] = {}
    result: list[VarInfo] = []
    for v in out:
        if v.name in seen:
            result[seen[v.name]] = v
        else:
            seen[v.name] = len(result)
            result.append(v)
    return result


def _varinfo(decl: Node, path: Path) -> VarInfo:
    return VarInfo(decl.children[0].label, decl.label, path)
