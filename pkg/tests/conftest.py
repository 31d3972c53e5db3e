from __future__ import annotations

import pytest

from uschema import fixtures
from uschema.model.types import (
    NUMBER,
    STRING,
    Attribute,
    EntityType,
    Key,
    StructuralVariation,
    USchemaModel,
)


def variation(vid, count, *features, first=None, last=None):
    return StructuralVariation(vid, count, tuple(features), first, last)


def root(name, *variations):
    return EntityType(name, tuple(variations), root=True)


def doc_key():
    return (Attribute("_id", NUMBER, is_key=True), Key("_id", ("_id",)))


def tiny_model() -> USchemaModel:
    """One root entity with two variations."""
    return USchemaModel("tiny", (root(
        "Person",
        variation(1, 3, *doc_key(), Attribute("name", STRING)),
        variation(2, 2, *doc_key(), Attribute("name", STRING), Attribute("age", NUMBER)),
    ),), ())


@pytest.fixture
def doc_model():
    return fixtures.aggregate_model("document")


@pytest.fixture
def graph_model():
    return fixtures.graph_model()


# acceptance criteria report a PASS/FAIL line that is repeated in the summary
_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        lines.append(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
