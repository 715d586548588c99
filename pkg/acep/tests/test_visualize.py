import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from acep.fiber import product  # noqa: E402
from acep.graph import build_stallings  # noqa: E402
from acep.visualize import draw_graph, to_networkx  # noqa: E402
from acep.words import Alphabet  # noqa: E402

XY = Alphabet(("x", "y"))


def test_parallel_edges_are_merged():
    g = build_stallings(XY, [XY.parse_word("x"), XY.parse_word("y")])
    graph = to_networkx(g)
    assert graph.number_of_nodes() == 1
    assert sorted(graph.edges[0, 0]["label"].split(",")) == ["x", "y"]


def test_drawing_runs():
    g = build_stallings(XY, [XY.parse_word("xx"), XY.parse_word("Yxxy")])
    ax = draw_graph(g)
    plt.close(ax.figure)

    _, ax = plt.subplots()
    assert draw_graph(product(g, remove_diagonal=True), ax=ax) is ax
    plt.close(ax.figure)
