from __future__ import annotations

from pathlib import Path

import pytest

from adforge.backends import MockBackend
from adforge.dot import parse_dot
from adforge.flow import Component, PromptSpec
from adforge.metrics import ReferenceOrder, TechniqueCatalog

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"

TINY_BRANCH_REPLY = """Here is the branch you asked for.

```dot
digraph reply {
  root [label="System under test", adtkind=root];
  svc [label="Service", adtkind=service];
  atk [label="Poke the service", adtkind=attack, mitre="T1078", step=1,
       cmd="curl target", inputs="host=target", expect="response observed"];
  goal [label="Goal reached", adtkind=goal];
  root -> svc; svc -> atk; atk -> goal;
}
```
"""


class FakeBackend:
    """Answers every prompt with the same tiny branch; counts calls."""

    def __init__(self, reply: str = TINY_BRANCH_REPLY):
        self.reply = reply
        self.calls = 0

    def complete(self, messages):
        self.calls += 1
        return self.reply


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def catalog() -> TechniqueCatalog:
    return TechniqueCatalog.load()


@pytest.fixture(scope="session")
def qwq_dot_text() -> str:
    return (FIXTURES / "trees" / "qwq.dot").read_text("utf-8")


@pytest.fixture()
def qwq_tree(qwq_dot_text):
    return parse_dot(qwq_dot_text)


@pytest.fixture()
def gpt4_tree():
    return parse_dot((FIXTURES / "trees" / "gpt4.dot").read_text("utf-8"))


@pytest.fixture(scope="session")
def qwq_reference() -> ReferenceOrder:
    return ReferenceOrder.from_file(FIXTURES / "references" / "qwq-order.txt")


@pytest.fixture(scope="session")
def gpt4_reference() -> ReferenceOrder:
    return ReferenceOrder.from_file(FIXTURES / "references" / "gpt4-order.txt")


@pytest.fixture(scope="session")
def govcloud_spec() -> PromptSpec:
    return PromptSpec.load(FIXTURES / "specs" / "govcloud.yaml")


@pytest.fixture(scope="session")
def qwq_backend() -> MockBackend:
    return MockBackend.load(FIXTURES / "transcripts" / "qwq.json")


@pytest.fixture()
def tiny_spec() -> PromptSpec:
    return PromptSpec(
        system_context="One service worth attacking.",
        components=[Component(technology="Service", safeguards=["audit log"])],
        attack_goals=["Goal reached"],
        tree_root="System under test",
    )


@pytest.fixture()
def fake_backend() -> FakeBackend:
    return FakeBackend()
