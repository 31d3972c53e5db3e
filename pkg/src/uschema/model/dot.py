"""Graphviz DOT rendering of a model."""

from __future__ import annotations

from html import escape

from .types import Aggregate, Attribute, Key, Reference, USchemaModel, UNBOUNDED, type_label


def _card(f) -> str:
    ub = "*" if f.upper_bound == UNBOUNDED else str(f.upper_bound)
    return f"{f.lower_bound}..{ub}"


def _feature_cell(f) -> str:
    if isinstance(f, Attribute):
        text = f"{f.name}: {type_label(f.type)}" + (" «key»" if f.is_key else "")
    elif isinstance(f, Key):
        text = f"key {f.name}({', '.join(f.attributes)})"
    elif isinstance(f, Reference):
        text = f"{f.name} → {f.refs_to} [{_card(f)}]"
        if f.featured_by is not None:
            text += f" by {f.featured_by.type_name}#{f.featured_by.variation}"
    else:
        targets = ", ".join(f"{t.type_name}#{t.variation}" for t in f.aggregates)
        text = f"{f.name} ◆ {targets} [{_card(f)}]"
    text = escape(text)
    return f"<i>{text}</i>" if getattr(f, "optional", False) else text


def _node(name: str, variations, header: str) -> str:
    rows = [f'<tr><td bgcolor="lightgrey"><b>{escape(header)}</b></td></tr>']
    for v in variations:
        cells = "<br/>".join(_feature_cell(f) for f in v.features) or "(empty)"
        rows.append(f'<tr><td align="left">v{v.id} ({v.count})<br/>{cells}</td></tr>')
    table = '<table border="0" cellborder="1" cellspacing="0">' + "".join(rows) + "</table>"
    return f'  "{name}" [label=<{table}>];'


def export_dot(model: USchemaModel) -> str:
    lines = [f'digraph "{model.name}" {{', "  node [shape=plaintext];"]
    for e in model.entities:
        header = e.name if e.root else f"{e.name} (embedded)"
        lines.append(_node(e.name, e.variations, header))
    for r in model.relationships:
        lines.append(_node(r.name, r.variations, f"«relationship» {r.name}"))

    edges: list[str] = []
    seen = set()

    def add(line):
        if line not in seen:
            seen.add(line)
            edges.append(line)

    for st in model.schema_types():
        for v in st.variations:
            for f in v.features:
                if isinstance(f, Reference):
                    add(f'  "{st.name}" -> "{f.refs_to}" [label="{f.name}"];')
                    if f.featured_by is not None:
                        add(f'  "{st.name}" -> "{f.featured_by.type_name}" '
                            f'[style=dashed, arrowhead=none];')
                elif isinstance(f, Aggregate):
                    for t in f.aggregates:
                        add(f'  "{st.name}" -> "{t.type_name}" '
                            f'[label="{f.name}", dir=both, arrowtail=diamond];')
    for e in model.entities:
        for p in e.parents:
            add(f'  "{e.name}" -> "{p}" [arrowhead=empty];')
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
