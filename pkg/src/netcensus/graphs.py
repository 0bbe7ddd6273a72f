"""Simple undirected graphs and the on-disk graph spec format.

A graph file is a YAML (or JSON) document::

    type: star          # one of star | chain | ring | complete | custom
    n: 6
    edges: [[0, 1], [0, 2]]   # required iff type == custom

Named types generate their own edge lists; supplying ``edges`` alongside a
named type is rejected to avoid silent disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .errors import ConfigError, InvalidGraph

NAMED_TYPES = ("star", "chain", "ring", "complete")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0 .. n-1``.

    Edges are stored sorted, each as an ``(i, j)`` pair with ``i < j``.
    Construction rejects self-loops, duplicates, and out-of-range vertices.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidGraph(f"graph needs at least one vertex, got n={self.n}")
        seen: set[tuple[int, int]] = set()
        normalized = []
        for edge in self.edges:
            if len(edge) != 2:
                raise InvalidGraph(f"edge {edge!r} is not a pair")
            a, b = int(edge[0]), int(edge[1])
            if a == b:
                raise InvalidGraph(f"self-loop at vertex {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise InvalidGraph(f"edge {edge!r} out of range for n={self.n}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise InvalidGraph(f"duplicate edge {key}")
            seen.add(key)
            normalized.append(key)
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    def neighbors(self, a: int) -> tuple[int, ...]:
        out = []
        for i, j in self.edges:
            if i == a:
                out.append(j)
            elif j == a:
                out.append(i)
        return tuple(sorted(out))

    def degree(self, a: int) -> int:
        return len(self.neighbors(a))


def star(n: int) -> Graph:
    """Star with center 0 and leaves 1..n-1 (n=1 gives the edgeless point)."""
    return Graph(n, tuple((0, k) for k in range(1, n)))


def chain(n: int) -> Graph:
    return Graph(n, tuple((k, k + 1) for k in range(n - 1)))


def ring(n: int) -> Graph:
    if n < 3:
        raise InvalidGraph(f"ring needs n >= 3, got {n}")
    return Graph(n, tuple((k, k + 1) for k in range(n - 1)) + ((0, n - 1),))


def complete(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


_BUILDERS = {"star": star, "chain": chain, "ring": ring, "complete": complete}


def graph_from_spec(spec: dict) -> Graph:
    """Build a Graph from a parsed graph-spec document."""
    if not isinstance(spec, dict):
        raise ConfigError(f"graph spec must be a mapping, got {type(spec).__name__}")
    kind = spec.get("type", "custom")
    if not isinstance(kind, str):
        raise ConfigError(f"graph type must be a string, got {kind!r}")
    try:
        n = int(spec["n"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("graph spec needs an integer 'n'") from None
    edges = spec.get("edges")
    if kind in _BUILDERS:
        if edges is not None:
            raise ConfigError(f"graph type {kind!r} generates its own edges; drop 'edges'")
        return _BUILDERS[kind](n)
    if kind == "custom":
        if edges is None:
            raise ConfigError("custom graph spec needs an 'edges' list")
        return Graph(n, tuple(tuple(e) for e in edges))
    raise ConfigError(f"unknown graph type {kind!r}")


def load_graph_file(path: str) -> Graph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            spec = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read graph file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse graph file {path}: {exc}") from exc
    return graph_from_spec(spec)
