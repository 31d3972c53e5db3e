from __future__ import annotations


def name_star(prop: str) -> str:
    """Entity name for an embedded property: capitalized, naive trailing-s stemming."""
    if not prop:
        raise ValueError("empty property name")
    name = prop[0].upper() + prop[1:]
    if name.endswith("s") and not name.endswith(("ss", "us")) and len(name) > 1:
        name = name[:-1]
    return name


def lower_first(name: str) -> str:
    return name[:1].lower() + name[1:]
