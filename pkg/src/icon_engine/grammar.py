"""Cell source grammar: a closed set of line statements plus opaque passthrough.

Every line of a cell maps to exactly one statement. Lines that do not match a
recognized production are preserved byte-exact as Opaque, so parsing is total
and render(parse(s)) never loses user text for unrecognized lines.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass
from enum import Enum

NUMBER = "number"
TEXT = "text"

COMPARATORS = ("<", "<=", ">", ">=", "==", "!=")

_AST_CMP = {
    ast.Lt: "<",
    ast.LtE: "<=",
    ast.Gt: ">",
    ast.GtE: ">=",
    ast.Eq: "==",
    ast.NotEq: "!=",
}


class CellKind(str, Enum):
    EMPTY = "Empty"
    CODE = "Code"
    DATA = "Data"
    VISUALIZATION = "Visualization"


@dataclass(frozen=True)
class LoadDataset:
    var: str
    dataset: str


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class TableLiteral:
    # columns: tuple of (name, dtype) with dtype in {number, text}
    columns: tuple
    rows: tuple  # tuple of tuples, floats for number cols, str for text cols


@dataclass(frozen=True)
class Assign:
    var: str
    expr: object  # VarRef | TableLiteral


@dataclass(frozen=True)
class FilterExpr:
    var: str
    source: str
    column: str
    comparator: str
    threshold: float


@dataclass(frozen=True)
class SelectCols:
    var: str
    source: str
    cols: tuple


@dataclass(frozen=True)
class PlotScatter:
    source: str
    cols: tuple  # 2 or 3 column names
    color: object = None  # None | VarRef | tuple of ints


@dataclass(frozen=True)
class KMeans:
    var: str
    source: str
    k: object  # int or parameter name


@dataclass(frozen=True)
class KnnGraph:
    source: str
    k: object  # int or parameter name


@dataclass(frozen=True)
class ParamDecl:
    name: str
    value: int
    low: int
    high: int


@dataclass(frozen=True)
class Opaque:
    text: str


_PARAM_RE = re.compile(
    r"^\s*([A-Za-z_]\w*)\s*=\s*(\d+)\s*#\s*range:\s*(\d+)\.\.(\d+)\s*$"
)


def _num(node):
    """Finite numeric literal value from an AST node, or None."""
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _num(node.operand)
        return None if inner is None else -inner
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool) \
            and math.isfinite(node.value):
        return float(node.value)
    return None


def _str(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return node.value
    return None


def _col_subscript(node):
    """Match df["col"] -> (df, col), else None."""
    if not isinstance(node, ast.Subscript):
        return None
    if not isinstance(node.value, ast.Name):
        return None
    col = _str(node.slice)
    if col is None:
        return None
    return node.value.id, col


def _k_arg(call):
    """The k= keyword of a builtin call: int literal or parameter name."""
    for kw in call.keywords:
        if kw.arg == "k":
            if isinstance(kw.value, ast.Constant) and isinstance(kw.value.value, int) \
                    and not isinstance(kw.value.value, bool):
                return kw.value.value
            if isinstance(kw.value, ast.Name):
                return kw.value.id
    return None


def _parse_table_literal(call):
    cols_node = rows_node = None
    for kw in call.keywords:
        if kw.arg == "columns":
            cols_node = kw.value
        elif kw.arg == "rows":
            rows_node = kw.value
    if cols_node is None or rows_node is None or call.args:
        return None
    try:
        raw_cols = ast.literal_eval(cols_node)
        raw_rows = ast.literal_eval(rows_node)
    except (ValueError, SyntaxError):
        return None
    if not isinstance(raw_cols, list) or not isinstance(raw_rows, list):
        return None
    columns = []
    for spec in raw_cols:
        if not isinstance(spec, str) or ":" not in spec:
            return None
        name, dtype = spec.rsplit(":", 1)
        if not name or dtype not in (NUMBER, TEXT):
            return None
        columns.append((name, dtype))
    if len({c[0] for c in columns}) != len(columns):
        return None
    rows = []
    for raw in raw_rows:
        if not isinstance(raw, list) or len(raw) != len(columns):
            return None
        vals = []
        for v, (_, dtype) in zip(raw, columns):
            if dtype == NUMBER:
                if isinstance(v, bool) or not isinstance(v, (int, float)) \
                        or not math.isfinite(v):
                    return None
                vals.append(float(v))
            else:
                if not isinstance(v, str):
                    return None
                vals.append(v)
        rows.append(tuple(vals))
    return TableLiteral(tuple(columns), tuple(rows))


def _parse_assign(node):
    if len(node.targets) != 1 or not isinstance(node.targets[0], ast.Name):
        return None
    var = node.targets[0].id
    value = node.value

    if isinstance(value, ast.Call) and isinstance(value.func, ast.Name):
        fn = value.func.id
        if fn == "load_dataset" and len(value.args) == 1 and not value.keywords:
            name = _str(value.args[0])
            if name is not None:
                return LoadDataset(var, name)
            return None
        if fn == "table":
            lit = _parse_table_literal(value)
            return Assign(var, lit) if lit is not None else None
        if fn == "kmeans" and len(value.args) == 1 \
                and isinstance(value.args[0], ast.Name):
            k = _k_arg(value)
            if k is not None and len(value.keywords) == 1:
                return KMeans(var, value.args[0].id, k)
            return None
        return None

    if isinstance(value, ast.Name):
        return Assign(var, VarRef(value.id))

    if isinstance(value, ast.Subscript) and isinstance(value.value, ast.Name):
        source = value.value.id
        sl = value.slice
        # df[["a", "b"]]
        if isinstance(sl, ast.List):
            cols = [_str(el) for el in sl.elts]
            if cols and all(c is not None for c in cols) \
                    and len(set(cols)) == len(cols):
                return SelectCols(var, source, tuple(cols))
            return None
        # df[df["col"] <= 3.0]
        if isinstance(sl, ast.Compare) and len(sl.ops) == 1 \
                and len(sl.comparators) == 1:
            lhs = _col_subscript(sl.left)
            op = _AST_CMP.get(type(sl.ops[0]))
            thr = _num(sl.comparators[0])
            if lhs and op and thr is not None and lhs[0] == source:
                return FilterExpr(var, source, lhs[1], op, thr)
            return None
    return None


def _parse_expr(node):
    value = node.value
    if not isinstance(value, ast.Call):
        return None
    call = value
    # plt.scatter(df["a"], df["b"][, df["c"]][, c=...])
    if isinstance(call.func, ast.Attribute) and call.func.attr == "scatter" \
            and isinstance(call.func.value, ast.Name) \
            and call.func.value.id == "plt":
        if len(call.args) not in (2, 3):
            return None
        subs = [_col_subscript(a) for a in call.args]
        if any(s is None for s in subs):
            return None
        sources = {s[0] for s in subs}
        if len(sources) != 1:
            return None
        color = None
        if call.keywords:
            if len(call.keywords) != 1 or call.keywords[0].arg != "c":
                return None
            cnode = call.keywords[0].value
            if isinstance(cnode, ast.Name):
                color = VarRef(cnode.id)
            elif isinstance(cnode, ast.List):
                vals = []
                for el in cnode.elts:
                    if isinstance(el, ast.Constant) and isinstance(el.value, int) \
                            and not isinstance(el.value, bool):
                        vals.append(el.value)
                    else:
                        return None
                color = tuple(vals)
            else:
                return None
        return PlotScatter(subs[0][0], tuple(s[1] for s in subs), color)
    # knn_graph(df, k=2) as a bare display statement
    if isinstance(call.func, ast.Name) and call.func.id == "knn_graph" \
            and len(call.args) == 1 and isinstance(call.args[0], ast.Name):
        k = _k_arg(call)
        if k is not None and len(call.keywords) == 1:
            return KnnGraph(call.args[0].id, k)
    return None


def parse_line(line: str):
    m = _PARAM_RE.match(line)
    if m:
        return ParamDecl(m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4)))
    try:
        tree = ast.parse(line, mode="exec")
    except (SyntaxError, ValueError):
        return Opaque(line)
    if len(tree.body) != 1:
        return Opaque(line)
    node = tree.body[0]
    stmt = None
    if isinstance(node, ast.Assign):
        stmt = _parse_assign(node)
    elif isinstance(node, ast.Expr):
        stmt = _parse_expr(node)
    return stmt if stmt is not None else Opaque(line)


def parse_source(source: str) -> list:
    """Total parse: one statement per line, Opaque for anything unrecognized."""
    if source == "":
        return []
    return [parse_line(line) for line in source.split("\n")]


def _render_color(color):
    if color is None:
        return ""
    if isinstance(color, VarRef):
        return f", c={color.name}"
    return f", c={list(color)!r}"


def render_statement(stmt) -> str:
    if isinstance(stmt, LoadDataset):
        return f'{stmt.var} = load_dataset("{stmt.dataset}")'
    if isinstance(stmt, Assign):
        if isinstance(stmt.expr, VarRef):
            return f"{stmt.var} = {stmt.expr.name}"
        lit = stmt.expr
        cols = [f"{name}:{dtype}" for name, dtype in lit.columns]
        rows = [list(r) for r in lit.rows]
        return f"{stmt.var} = table(columns={cols!r}, rows={rows!r})"
    if isinstance(stmt, FilterExpr):
        return (f'{stmt.var} = {stmt.source}[{stmt.source}["{stmt.column}"] '
                f"{stmt.comparator} {stmt.threshold!r}]")
    if isinstance(stmt, SelectCols):
        return f"{stmt.var} = {stmt.source}[{list(stmt.cols)!r}]"
    if isinstance(stmt, PlotScatter):
        args = ", ".join(f'{stmt.source}["{c}"]' for c in stmt.cols)
        return f"plt.scatter({args}{_render_color(stmt.color)})"
    if isinstance(stmt, KMeans):
        return f"{stmt.var} = kmeans({stmt.source}, k={stmt.k})"
    if isinstance(stmt, KnnGraph):
        return f"knn_graph({stmt.source}, k={stmt.k})"
    if isinstance(stmt, ParamDecl):
        return f"{stmt.name} = {stmt.value}  # range: {stmt.low}..{stmt.high}"
    if isinstance(stmt, Opaque):
        return stmt.text
    raise TypeError(f"unknown statement {stmt!r}")


def render(statements) -> str:
    return "\n".join(render_statement(s) for s in statements)


def classify_statements(statements) -> CellKind:
    if any(isinstance(s, (PlotScatter, KnnGraph)) for s in statements):
        return CellKind.VISUALIZATION
    if any(isinstance(s, (LoadDataset, Assign, FilterExpr, SelectCols))
           for s in statements):
        return CellKind.DATA
    return CellKind.CODE


def classify_cell(source: str) -> CellKind:
    """One kind per cell; visualization statements outrank data statements."""
    if source.strip() == "":
        return CellKind.EMPTY
    return classify_statements(parse_source(source))


def defined_variables(statements):
    """Names bound by executing these statements, in order."""
    out = []
    for s in statements:
        if isinstance(s, (LoadDataset,)):
            out.append(s.var)
        elif isinstance(s, (Assign, FilterExpr, SelectCols, KMeans)):
            out.append(s.var)
        elif isinstance(s, ParamDecl):
            out.append(s.name)
    return out
