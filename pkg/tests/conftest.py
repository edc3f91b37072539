import pytest

from cattree import CategoricalIndex, CategoryTree, Corpus
from cattree.index import verification_specs

# running example: r{u{l1,l2}, v{l3,l4}} with r=0, u=1, v=2, l1..l4=3..6
RUNNING_DOCS = ["ab", "ba", "aa", "bb"]
RUNNING_PARENT = [-1, 0, 0, 1, 1, 2, 2]
RUNNING_LEAVES = [3, 4, 5, 6]
R, U, V = 0, 1, 2

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def corpus():
    return Corpus.from_documents(RUNNING_DOCS)


@pytest.fixture
def tree():
    return CategoryTree(RUNNING_PARENT, RUNNING_LEAVES)


@pytest.fixture
def running_index(corpus, tree):
    return CategoricalIndex.build(corpus, tree, verification_specs(2))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
