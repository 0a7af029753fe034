"""
Perfect matching de costo mínimo en la grilla k x k sin diagonales.

Layout de aristas: primero las horizontales (r, c)-(r, c+1) en el índice
r*(k-1)+c, luego las verticales (r, c)-(r+1, c) en k(k-1)+r*k+c.
N = 2k(k-1).

El solver exacto es un DP por perfil roto (broken profile) sobre las
celdas en orden de filas: el estado es la máscara de las k celdas
siguientes que ya quedaron cubiertas.
"""
from typing import Iterator, List, Tuple

import numpy as np

from combigrad.core import Solution, SolverHandle, as_weights, is_tie, objective
from combigrad.errors import CapacityError, InstanceError

EXACT_MAX_K = 8
# 6x6 tiene 6728 matchings perfectos; 8x8 ya supera los 12 millones
ENUMERATE_MAX_K = 6


class MatchingInstance:
    def __init__(self, k: int):
        if k < 2 or k % 2:
            raise InstanceError("grid matching needs an even side length", k=k)
        self.k = int(k)
        self.edges: List[Tuple[int, int]] = []
        for r in range(k):
            for c in range(k - 1):
                self.edges.append((r * k + c, r * k + c + 1))
        for r in range(k - 1):
            for c in range(k):
                self.edges.append((r * k + c, (r + 1) * k + c))
        self._incidence = None

    @property
    def size(self) -> int:
        return len(self.edges)

    def h_index(self, r: int, c: int) -> int:
        return r * (self.k - 1) + c

    def v_index(self, r: int, c: int) -> int:
        return self.k * (self.k - 1) + r * self.k + c

    def incidence(self) -> np.ndarray:
        """Matriz vértice x arista (0/1)."""
        if self._incidence is None:
            B = np.zeros((self.k * self.k, self.size), dtype=np.int64)
            for n, (u, v) in enumerate(self.edges):
                B[u, n] = 1
                B[v, n] = 1
            self._incidence = B
        return self._incidence

    def digit_reading_matrix(self) -> np.ndarray:
        """
        Matriz M (N x k²) con costo_arista = M @ dígitos: 10 para el vértice
        izquierdo/superior, 1 para el derecho/inferior.
        """
        M = np.zeros((self.size, self.k * self.k))
        for n, (first, second) in enumerate(self.edges):
            M[n, first] = 10.0
            M[n, second] = 1.0
        return M

    def edge_costs_from_digits(self, digits) -> np.ndarray:
        d = np.asarray(digits, dtype=np.float64).reshape(-1)
        if d.shape[0] != self.k * self.k:
            raise InstanceError("digit grid must have k*k entries", expected=self.k * self.k, received=d.shape[0])
        return self.digit_reading_matrix() @ d

    def is_perfect_matching(self, indicator: np.ndarray) -> bool:
        ind = np.asarray(indicator).reshape(-1)
        if ind.shape[0] != self.size or not np.all((ind == 0) | (ind == 1)):
            return False
        return bool(np.all(self.incidence() @ ind.astype(np.int64) == 1))


def _profile_values(instance: MatchingInstance, w: np.ndarray) -> np.ndarray:
    """V[p, mask]: costo mínimo para completar desde la celda p con el perfil `mask`."""
    k = instance.k
    cells = k * k
    top = 1 << (k - 1)
    V = np.full((cells + 1, 1 << k), np.inf)
    V[cells, 0] = 0.0

    for p in range(cells - 1, -1, -1):
        r, c = divmod(p, k)
        nxt = V[p + 1]
        for mask in range(1 << k):
            rest = mask >> 1
            if mask & 1:
                V[p, mask] = nxt[rest]
                continue
            best = np.inf
            if c + 1 < k and not mask & 2:
                best = min(best, w[instance.h_index(r, c)] + nxt[rest | 1])
            if r + 1 < k:
                best = min(best, w[instance.v_index(r, c)] + nxt[rest | top])
            V[p, mask] = best
    return V


def matching_exact(instance: MatchingInstance, edge_costs) -> Solution:
    """
    Matching perfecto óptimo. Entre co-óptimos devuelve el indicador
    lexicográficamente mayor: al reconstruir se prefiere la arista
    horizontal, y las horizontales van primero en el layout y en el mismo
    orden que las celdas.
    """
    w = as_weights(edge_costs, instance.size, name="edge_costs")
    k = instance.k
    if k > EXACT_MAX_K:
        raise CapacityError("exact matching is limited to small grids", k=k, guard=EXACT_MAX_K)

    V = _profile_values(instance, w)
    if not np.isfinite(V[0, 0]):
        raise InstanceError("grid has no perfect matching", k=k)

    top = 1 << (k - 1)
    ind = np.zeros(instance.size, dtype=np.int8)
    mask = 0
    for p in range(k * k):
        r, c = divmod(p, k)
        rest = mask >> 1
        if mask & 1:
            mask = rest
            continue
        target = V[p, mask]
        if c + 1 < k and not mask & 2:
            h = instance.h_index(r, c)
            via_h = w[h] + V[p + 1, rest | 1]
            if np.isfinite(via_h) and is_tie(via_h, target):
                ind[h] = 1
                mask = rest | 1
                continue
        ind[instance.v_index(r, c)] = 1
        mask = rest | top
    return Solution(indicator=ind, objective=objective(w, ind))


class PerfectMatching(SolverHandle):
    family = "pm"

    def __init__(self, instance: MatchingInstance):
        if instance.k > EXACT_MAX_K:
            raise CapacityError("exact matching is limited to small grids", k=instance.k, guard=EXACT_MAX_K)
        self.instance = instance

    @property
    def size(self) -> int:
        return self.instance.size

    def _solve(self, w: np.ndarray) -> np.ndarray:
        return matching_exact(self.instance, w).indicator

    def feasible(self, indicator: np.ndarray) -> bool:
        return self.instance.is_perfect_matching(indicator)

    def enumerate(self) -> Iterator[np.ndarray]:
        if self.instance.k > ENUMERATE_MAX_K:
            raise CapacityError(
                "matching enumeration is limited to small grids",
                k=self.instance.k,
                guard=ENUMERATE_MAX_K,
            )
        return self._all_matchings()

    def _all_matchings(self) -> Iterator[np.ndarray]:
        inst = self.instance
        k = inst.k
        top = 1 << (k - 1)
        chosen: List[int] = []

        def walk(p: int, mask: int):
            if p == k * k:
                if mask == 0:
                    ind = np.zeros(inst.size, dtype=np.int8)
                    ind[chosen] = 1
                    yield ind
                return
            r, c = divmod(p, k)
            rest = mask >> 1
            if mask & 1:
                yield from walk(p + 1, rest)
                return
            if c + 1 < k and not mask & 2:
                chosen.append(inst.h_index(r, c))
                yield from walk(p + 1, rest | 1)
                chosen.pop()
            if r + 1 < k:
                chosen.append(inst.v_index(r, c))
                yield from walk(p + 1, rest | top)
                chosen.pop()

        return walk(0, 0)

    def describe(self):
        info = super().describe()
        info["k"] = self.instance.k
        return info
