"""
Diagram rendering for stratum posets and embedding maps.

Graphviz text for `--format dot` and a plain listing for the terminal.
Dashed edges are closure relations (covers of the order), solid edges are
images under an embedding.
"""

import logging
from itertools import groupby
from typing import Iterable, List, Sequence, Tuple


# Configure logger
logger = logging.getLogger(__name__)

Node = Tuple[str, int]  # (label, dimension)
Edge = Tuple[str, str]


def _quote(name: str) -> str:
    return '"{}"'.format(name.replace('"', '\\"'))


def _ranked_nodes(nodes: Sequence[Node], prefix: str = "") -> List[str]:
    lines = []
    ordered = sorted(nodes, key=lambda node: (node[1], node[0]))
    for dim, group in groupby(ordered, key=lambda node: node[1]):
        members = " ".join(_quote(prefix + name) for name, _ in group)
        lines.append(f"{{rank=same; {members}}}")
    return lines


def hasse_dot(title: str, nodes: Sequence[Node], covers: Iterable[Edge]) -> str:
    """
    Render a stratum poset as a bottom-up digraph.

    To turn the output into an image, save it as strata.dot and run:

    $ dot -Tpng strata.dot > strata.png
    """
    lines = ["digraph {", "graph [rankdir=BT];", f"label={_quote(title)};"]
    append = lines.append
    append("node [fontname=Helvetica shape=box];")
    for name, dim in nodes:
        append(f'{_quote(name)} [label="{name}\\ndim {dim}"];')
    lines.extend(_ranked_nodes(nodes))
    covers = list(covers)
    for lower, upper in covers:
        append(f"{_quote(lower)} -> {_quote(upper)} [style=dashed arrowhead=none];")
    append("}")
    logger.debug(f"Hasse diagram {title!r}: {len(nodes)} nodes, {len(covers)} covers")
    return "\n".join(lines)


def embedding_dot(
    title: str,
    source: Tuple[Sequence[Node], Iterable[Edge]],
    target: Tuple[Sequence[Node], Iterable[Edge]],
    images: Iterable[Edge],
) -> str:
    """Two stratum posets side by side with solid arrows source -> image."""
    lines = ["digraph {", "graph [rankdir=BT compound=true];", f"label={_quote(title)};"]
    append = lines.append
    append("node [fontname=Helvetica shape=box];")
    for key, (nodes, covers) in (("source", source), ("target", target)):
        prefix = f"{key}:"
        append(f"subgraph cluster_{key} {{")
        append(f'label="{key}";')
        for name, dim in nodes:
            append(f'{_quote(prefix + name)} [label="{name}\\ndim {dim}"];')
        for lower, upper in covers:
            append(f"{_quote(prefix + lower)} -> {_quote(prefix + upper)} [style=dashed arrowhead=none];")
        append("}")
    images = list(images)
    for src, dst in images:
        append(f'{_quote("source:" + src)} -> {_quote("target:" + dst)} [style=solid constraint=false];')
    append("}")
    logger.debug(f"Embedding diagram {title!r}: {len(images)} images")
    return "\n".join(lines)


def hasse_ascii(nodes: Sequence[Node], covers: Iterable[Edge]) -> str:
    """One line per dimension, top first, followed by the covering pairs."""
    lines = []
    ordered = sorted(nodes, key=lambda node: (-node[1], node[0]))
    for dim, group in groupby(ordered, key=lambda node: node[1]):
        lines.append(f"dim {dim}: " + "  ".join(name for name, _ in group))
    covers = list(covers)
    if covers:
        lines.append("covers: " + ", ".join(f"{a} < {b}" for a, b in covers))
    return "\n".join(lines)


def chain(nodes: Sequence[Node]) -> List[Edge]:
    """Covers of a totally ordered list of nodes, sorted by dimension."""
    ordered = sorted(nodes, key=lambda node: node[1])
    return [(a[0], b[0]) for a, b in zip(ordered, ordered[1:])]
