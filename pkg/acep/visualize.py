from collections import defaultdict
from typing import Optional

import matplotlib.pyplot as plt
import networkx as nx

from acep.graph import Vertex, XDigraph

BASEPOINT_COLOR = "tab:red"
VERTEX_COLOR = "tab:blue"


def to_networkx(g: XDigraph) -> nx.DiGraph:
    """Directed graph with one edge per ordered vertex pair; parallel edges are
    merged and their generator symbols joined in the ``label`` attribute."""
    labels = defaultdict(list)
    for o, t, x in g.edges:
        labels[(o, t)].append(g.alphabet.names[x])
    graph = nx.DiGraph()
    graph.add_nodes_from(g.vertices)
    for (o, t), names in labels.items():
        graph.add_edge(o, t, label=",".join(names))
    return graph


def draw_graph(
    g: XDigraph, ax: Optional[plt.Axes] = None, basepoint: Optional[Vertex] = None, seed: int = 0
) -> plt.Axes:
    """Draws an X-digraph with edge labels, highlighting ``basepoint``.

    Parameters
    ----------
    g : XDigraph
        Any labeled graph; a StallingsGraph supplies its own basepoint.
    ax : matplotlib Axes, optional
        Axes to draw on. A new figure is created if None.
    basepoint : vertex, optional
    seed : int, optional
        Seed for the spring layout, default 0.

    Returns
    -------
    matplotlib Axes
    """
    if ax is None:
        _, ax = plt.subplots()
    if basepoint is None:
        basepoint = getattr(g, "basepoint", None)

    graph = to_networkx(g)
    positions = nx.spring_layout(graph, seed=seed)
    colors = [BASEPOINT_COLOR if v == basepoint else VERTEX_COLOR for v in graph.nodes]

    nx.draw_networkx_nodes(graph, positions, ax=ax, node_color=colors)
    nx.draw_networkx_labels(graph, positions, ax=ax)
    nx.draw_networkx_edges(graph, positions, ax=ax, arrows=True, connectionstyle="arc3,rad=0.15")
    nx.draw_networkx_edge_labels(
        graph, positions, ax=ax, edge_labels=nx.get_edge_attributes(graph, "label")
    )
    ax.set_axis_off()
    return ax
