"""Layer representation of the paging work function."""

from __future__ import annotations

from typing import Iterable, Sequence

Layers = tuple  # tuple of k frozensets, L_1 first


def empty_layers(k: int) -> Layers:
    return tuple(frozenset() for _ in range(k))


def make_layers(groups: Iterable[Iterable[int]]) -> Layers:
    return tuple(frozenset(g) for g in groups)


def layer_update(layers: Layers, p: int) -> Layers:
    """Apply one request to the layer representation.

    p in L_j, j < k:  (p, L_1..L_{j-1}, L_j | L_{j+1} - {p}, L_{j+2}..L_k)
    p in L_k:         (p, L_1..L_{k-1})
    p elsewhere:      (p, L_1 | L_2, L_3..L_k)
    """
    k = len(layers)
    head = frozenset([p])
    for j, layer in enumerate(layers):
        if p in layer:
            if j == k - 1:
                return (head,) + layers[:k - 1]
            merged = (layer | layers[j + 1]) - head
            return (head,) + layers[:j] + (merged,) + layers[j + 2:]
    if k == 1:
        return (head,)
    return (head, layers[0] | layers[1]) + layers[2:]


def layer_trace(s: Sequence[int], k: int, start: Layers | None = None) -> list[Layers]:
    """Layers after each request (the starting layers are not included)."""
    cur = empty_layers(k) if start is None else start
    out = []
    for p in s:
        cur = layer_update(cur, p)
        out.append(cur)
    return out


def size_vector(layers: Layers) -> tuple[int, ...]:
    return tuple(len(layer) for layer in layers)


def layers_equal_up_to_renaming(a: Layers, b: Layers) -> bool:
    return size_vector(a) == size_vector(b)


def format_layers(layers: Layers) -> str:
    return "(" + ", ".join("".join(str(p) for p in sorted(layer)) for layer in layers) + ")"
