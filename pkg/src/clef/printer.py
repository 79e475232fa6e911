"""Pretty printer: emit compilable C source from an Ast.

Output is canonical rather than faithful to the original layout: expressions
are fully parenthesized, bodies always use braces, one statement per line.
The only contract is that printing then reparsing reproduces the tree.
"""

from __future__ import annotations

from .nodes import Ast, Node, NodeKind

_INDENT = "    "

_ATOMS = (NodeKind.IDENTIFIER, NodeKind.LITERAL)


def to_source(ast: Ast) -> str:
    lines: list[str] = list(ast.preamble)
    if ast.preamble:
        lines.append("")
    root = ast.root
    items = root.children if _is_unit_block(root) else (root,)
    for i, item in enumerate(items):
        if i and item.kind is NodeKind.FUNC_DEF:
            lines.append("")
        _emit_toplevel(item, lines)
    return "\n".join(lines) + "\n"


def print_ast(ast: Ast) -> str:
    return to_source(ast)


def _is_unit_block(root: Node) -> bool:
    return root.kind is NodeKind.BLOCK and any(
        c.kind is NodeKind.FUNC_DEF for c in root.children
    )


def _emit_toplevel(node: Node, lines: list[str]) -> None:
    if node.kind is NodeKind.FUNC_DEF:
        *params, body = node.children
        args = ", ".join(_decl_text(p) for p in params)
        lines.append(f"{node.label}({args})")
        lines.append("{")
        for stmt in body.children:
            _emit_stmt(stmt, lines, 1)
        lines.append("}")
    else:
        _emit_stmt(node, lines, 0)


def _emit_stmt(node: Node, lines: list[str], depth: int) -> None:
    pad = _INDENT * depth
    kind = node.kind
    if kind is NodeKind.EMPTY:
        return  # no tokens for the empty statement
    if kind is NodeKind.BLOCK:
        lines.append(pad + "{")
        for stmt in node.children:
            _emit_stmt(stmt, lines, depth + 1)
        lines.append(pad + "}")
        return
    if kind is NodeKind.DECL:
        lines.append(pad + _decl_text(node) + ";")
        return
    if kind is NodeKind.RETURN:
        if node.children:
            lines.append(pad + f"return {_expr(node.children[0], top=True)};")
        else:
            lines.append(pad + "return;")
        return
    if kind is NodeKind.BREAK:
        lines.append(pad + "break;")
        return
    if kind is NodeKind.CONTINUE:
        lines.append(pad + "continue;")
        return
    if kind is NodeKind.IF:
        guard, then, *rest = node.children
        lines.append(pad + f"if ({_expr(guard, top=True)})")
        _emit_stmt(then, lines, depth)
        if rest:
            lines.append(pad + "else")
            _emit_stmt(rest[0], lines, depth)
        return
    if kind is NodeKind.WHILE:
        guard, body = node.children
        lines.append(pad + f"while ({_expr(guard, top=True)})")
        _emit_stmt(body, lines, depth)
        return
    if kind is NodeKind.FOR:
        init, cond, step, body = node.children
        init_txt, cond_txt, step_txt = (_for_part(p) for p in (init, cond, step))
        header = f"{init_txt};"
        header += f" {cond_txt};" if cond_txt else ";"
        if step_txt:
            header += f" {step_txt}"
        lines.append(pad + f"for ({header})")
        _emit_stmt(body, lines, depth)
        return
    # expression statement
    lines.append(pad + _expr(node, top=True) + ";")


def _for_part(node: Node) -> str:
    if node.kind is NodeKind.EMPTY:
        return ""
    if node.kind is NodeKind.DECL:
        return _decl_text(node)
    return _expr(node, top=True)


def _decl_text(node: Node) -> str:
    label = node.label
    ident = node.children[0]
    if label.endswith("[]"):
        base = label[:-2]
        if len(node.children) > 1 and node.children[1].kind is not NodeKind.EMPTY:
            return f"{base} {ident.label}[{_expr(node.children[1], top=True)}]"
        return f"{base} {ident.label}[]"
    if len(node.children) > 1:
        return f"{label} {ident.label} = {_expr(node.children[1])}"
    return f"{label} {ident.label}"


def _expr(node: Node, top: bool = False) -> str:
    kind = node.kind
    if kind in _ATOMS:
        return node.label
    if kind is NodeKind.CALL:
        callee, *args = node.children
        return f"{_expr(callee)}({', '.join(_expr(a) for a in args)})"
    if kind is NodeKind.BIN_OP:
        label = node.label
        left, right = node.children
        if label == "[]":
            return f"{_expr(left)}[{_expr(right, top=True)}]"
        if label == "?":
            arms = right
            body = f"{_expr(left)} ? {_expr(arms.children[0])} : {_expr(arms.children[1])}"
            return body if top else f"({body})"
        if label == ",":
            body = f"{_expr(left)}, {_expr(right)}"
            return body if top else f"({body})"
        body = f"{_expr(left)} {label} {_expr(right)}"
        return body if top else f"({body})"
    if kind is NodeKind.ASSIGN:
        left, right = node.children
        body = f"{_expr(left)} {node.label} {_expr(right)}"
        return body if top else f"({body})"
    if kind is NodeKind.UN_OP:
        label = node.label
        operand = node.children[0]
        if label.startswith("p"):
            return f"{_expr(operand)}{label[1:]}"
        body = f"{label}{_expr(operand)}"
        return body if top else f"({body})"
    raise ValueError(f"cannot print node of kind {kind} in expression position")
