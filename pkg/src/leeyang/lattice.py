"""Finite subsets of Z^d with free boundary conditions.

A :class:`SpinDomain` is a vertex set together with every nearest-neighbour
edge whose two endpoints lie in the set.  Vertices are stored sorted
lexicographically so that two constructions of the same set are identical.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

# Vertex-count cap for domain construction; configuration caps live with the
# engines that enumerate (partition.ENUMERATION_CAP, partition.STATE_CAP).
DEFAULT_SIZE_CAP = 2**20


class CapExceeded(ValueError):
    """A request exceeds a configured engine cap."""

    def __init__(self, message, required=None, cap=None):
        super().__init__(message)
        self.required = required
        self.cap = cap


@dataclass(frozen=True)
class SpinDomain:
    dimension: int
    vertices: tuple
    edges: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        verts = tuple(sorted({tuple(int(c) for c in v) for v in self.vertices}))
        if len(verts) != len(self.vertices):
            raise ValueError("vertices must be pairwise distinct")
        if not verts:
            raise ValueError("a domain needs at least one vertex")
        if any(len(v) != self.dimension for v in verts):
            raise ValueError("vertex coordinates must have length d")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", _induced_edges(verts))

    @property
    def num_sites(self):
        return len(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def index_of(self, vertex):
        return self._index()[tuple(vertex)]

    def _index(self):
        try:
            return self.__dict__["_idx"]
        except KeyError:
            idx = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_idx", idx)
            return idx

    def contains(self, other):
        """True when every vertex of ``other`` is a vertex of ``self``."""
        mine = self._index()
        return other.dimension == self.dimension and all(v in mine for v in other.vertices)

    def side_lengths(self):
        """Side lengths if the domain is an axis-aligned box, else ``None``."""
        lo = [min(v[a] for v in self.vertices) for a in range(self.dimension)]
        hi = [max(v[a] for v in self.vertices) for a in range(self.dimension)]
        sides = [h - l + 1 for l, h in zip(lo, hi)]
        if math.prod(sides) != self.num_sites:
            return None
        return sides

    def describe(self):
        """Compact description: corner and sides for boxes, vertex list otherwise."""
        sides = self.side_lengths()
        if sides is not None:
            return {"dimension": self.dimension, "corner": list(self.vertices[0]), "sides": sides}
        return {"dimension": self.dimension, "vertices": [list(v) for v in self.vertices]}

    @classmethod
    def from_description(cls, data):
        d = int(data["dimension"])
        if "sides" in data:
            ranges = [range(c, c + s) for c, s in zip(data["corner"], data["sides"])]
            return cls(d, tuple(itertools.product(*ranges)))
        return cls(d, tuple(tuple(v) for v in data["vertices"]))

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "vertices": [list(v) for v in self.vertices],
            "edges": [list(e) for e in self.edges],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data):
        dom = cls(int(data["dimension"]), tuple(tuple(v) for v in data["vertices"]))
        if "edges" in data and [list(e) for e in dom.edges] != [list(e) for e in data["edges"]]:
            raise ValueError("edge list does not match the induced nearest-neighbour edges")
        return dom


def _induced_edges(verts):
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for i, v in enumerate(verts):
        for axis in range(len(v)):
            w = v[:axis] + (v[axis] + 1,) + v[axis + 1 :]
            j = index.get(w)
            if j is not None:
                edges.append((i, j))
    edges.sort()
    return tuple(edges)


def box_edge_count(sides):
    """Edge count of an axis-aligned box: sum_i (L_i - 1) prod_{j != i} L_j."""
    total = 0
    for i, L in enumerate(sides):
        total += (L - 1) * math.prod(s for j, s in enumerate(sides) if j != i)
    return total


def _check_cap(num_sites, size_cap):
    if num_sites > size_cap:
        raise CapExceeded(
            f"domain with {num_sites} sites exceeds the size cap {size_cap}; "
            f"raise the cap to at least {num_sites}",
            required=num_sites,
            cap=size_cap,
        )


def make_box(d, n, size_cap=DEFAULT_SIZE_CAP):
    """The centred box B_n = [-n, n]^d intersected with Z^d."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    _check_cap((2 * n + 1) ** d, size_cap)
    coords = range(-n, n + 1)
    return SpinDomain(d, tuple(itertools.product(coords, repeat=d)))


def make_rectangle(d, side_lengths, size_cap=DEFAULT_SIZE_CAP):
    """Axis-aligned box ``[0, L_1) x ... x [0, L_d)`` anchored at the origin."""
    sides = [int(s) for s in side_lengths]
    if d < 1 or len(sides) != d or any(s < 1 for s in sides):
        raise ValueError("need d positive side lengths")
    _check_cap(math.prod(sides), size_cap)
    return SpinDomain(d, tuple(itertools.product(*(range(s) for s in sides))))


def nested_boxes(d, n_max, size_cap=DEFAULT_SIZE_CAP):
    """[B_1, ..., B_{n_max}], each containing the previous one."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    _check_cap((2 * n_max + 1) ** d, size_cap)
    return [make_box(d, n, size_cap) for n in range(1, n_max + 1)]
