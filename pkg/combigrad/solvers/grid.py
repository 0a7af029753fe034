"""
Camino mínimo sobre una grilla k x k con costos en los vértices.

Fuente arriba a la izquierda, destino abajo a la derecha. El costo de un
camino es la suma de los costos de todos sus vértices (ambos extremos
incluidos), así que el indicador vive sobre los k² vértices y
c(w, y) = w . phi(y). La reducción a Dijkstra sobre aristas cobra a cada
movimiento el costo del vértice de llegada, más el de la fuente una vez.
"""
import heapq
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import numpy as np

from combigrad.core import Solution, SolverHandle, as_weights, objective
from combigrad.errors import CapacityError, InputError, InstanceError

_OFFSETS_4 = ((-1, 0), (0, -1), (0, 1), (1, 0))
_OFFSETS_8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

# Enumerar caminos inducidos explota rápido; sólo grillas chicas
ENUMERATE_MAX_K = 4


@dataclass(frozen=True)
class GridGraph:
    k: int
    connectivity: int = 8

    def __post_init__(self):
        if self.k < 2:
            raise InstanceError("grid side must be at least 2", k=self.k)
        if self.connectivity not in (4, 8):
            raise InstanceError("connectivity must be 4 or 8", connectivity=self.connectivity)

    @property
    def size(self) -> int:
        return self.k * self.k

    @property
    def source(self) -> int:
        return 0

    @property
    def target(self) -> int:
        return self.k * self.k - 1

    def neighbors(self, idx: int) -> List[int]:
        r, c = divmod(idx, self.k)
        offsets = _OFFSETS_4 if self.connectivity == 4 else _OFFSETS_8
        out = []
        for dr, dc in offsets:
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.k and 0 <= cc < self.k:
                out.append(rr * self.k + cc)
        return out


def dijkstra_grid(grid: GridGraph, vertex_costs) -> Solution:
    w = as_weights(vertex_costs, grid.size, name="vertex_costs")
    if np.any(w <= 0):
        bad = int(np.flatnonzero(w <= 0)[0])
        raise InputError("Dijkstra needs strictly positive vertex costs", index=bad, value=float(w[bad]))

    dist = np.full(grid.size, np.inf)
    parent = np.full(grid.size, -1, dtype=np.int64)
    dist[grid.source] = w[grid.source]
    heap: List[Tuple[float, int]] = [(float(w[grid.source]), grid.source)]

    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == grid.target:
            break
        for v in grid.neighbors(u):
            nd = d + w[v]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))

    indicator = np.zeros(grid.size, dtype=np.int8)
    node = grid.target
    while node != -1:
        indicator[node] = 1
        node = int(parent[node])
    return Solution(indicator=indicator, objective=objective(w, indicator))


class GridShortestPath(SolverHandle):
    """
    Handle de camino mínimo. Y = conjuntos de vértices de caminos inducidos
    fuente-destino, que es exactamente lo que Dijkstra devuelve con costos
    positivos (una cuerda siempre acorta el camino).
    """

    family = "sp"

    def __init__(self, grid: GridGraph, weight_floor: float = 1e-3):
        if weight_floor <= 0:
            raise InstanceError("weight_floor must be positive", weight_floor=weight_floor)
        self.grid = grid
        self.weight_floor = float(weight_floor)
        self._adj: Dict[int, List[int]] = {i: grid.neighbors(i) for i in range(grid.size)}

    @property
    def size(self) -> int:
        return self.grid.size

    def _solve(self, w: np.ndarray) -> np.ndarray:
        return dijkstra_grid(self.grid, w).indicator

    def project(self, w: np.ndarray) -> np.ndarray:
        return np.maximum(w, self.weight_floor)

    def feasible(self, indicator: np.ndarray) -> bool:
        ind = np.asarray(indicator).reshape(-1)
        if ind.shape[0] != self.size or not np.all((ind == 0) | (ind == 1)):
            return False
        on = set(int(i) for i in np.flatnonzero(ind))
        s, t = self.grid.source, self.grid.target
        if s not in on or t not in on:
            return False

        for v in on:
            deg = sum(1 for u in self._adj[v] if u in on)
            if deg != (1 if v in (s, t) else 2):
                return False

        # grados 1-2-...-2-1 + conexo => camino simple inducido de s a t
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in self._adj[u]:
                if v in on and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == on

    def enumerate(self) -> Iterator[np.ndarray]:
        if self.grid.k > ENUMERATE_MAX_K:
            raise CapacityError(
                "path enumeration is limited to small grids",
                k=self.grid.k,
                guard=ENUMERATE_MAX_K,
            )
        return self._induced_paths()

    def _induced_paths(self) -> Iterator[np.ndarray]:
        s, t = self.grid.source, self.grid.target
        path = [s]
        on_path = {s}

        def extend():
            last = path[-1]
            if last == t:
                ind = np.zeros(self.size, dtype=np.int8)
                ind[path] = 1
                yield ind
                return
            for v in self._adj[last]:
                if v in on_path:
                    continue
                # v no puede tocar ningún vértice del camino salvo el último
                if any(u in on_path and u != last for u in self._adj[v]):
                    continue
                path.append(v)
                on_path.add(v)
                yield from extend()
                path.pop()
                on_path.discard(v)

        return extend()

    def describe(self):
        info = super().describe()
        info.update({"k": self.grid.k, "connectivity": self.grid.connectivity})
        return info
