"""
TSP simétrico con indicador sobre aristas.

Layout: triángulo superior por filas, (0,1), (0,2), ..., (0,k-1), (1,2), ...
N = k(k-1)/2. Un tour marca exactamente k aristas.
"""
import itertools
import logging
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from combigrad.core import Solution, SolverHandle, as_weights, objective
from combigrad.errors import CapacityError, InstanceError

logger = logging.getLogger(__name__)

# Held-Karp: O(2^k k²) en tiempo y memoria
EXACT_MAX_K = 20
# 8!/2 = 20160 tours; más que eso no se enumera
ENUMERATE_MAX_K = 9


class TspInstance:
    def __init__(self, k: int):
        if k < 3:
            raise InstanceError("a tour needs at least 3 cities", k=k)
        self.k = int(k)
        self.edges: List[Tuple[int, int]] = [(i, j) for i in range(k) for j in range(i + 1, k)]
        self.edge_index: Dict[Tuple[int, int], int] = {e: n for n, e in enumerate(self.edges)}
        self._iu = np.triu_indices(k, 1)

    @property
    def size(self) -> int:
        return len(self.edges)

    def index(self, i: int, j: int) -> int:
        return self.edge_index[(i, j) if i < j else (j, i)]

    def matrix(self, dist: np.ndarray) -> np.ndarray:
        """Vector de aristas -> matriz simétrica k x k con diagonal cero."""
        D = np.zeros((self.k, self.k))
        D[self._iu] = dist
        return D + D.T

    def chord_distances(self, locations: np.ndarray) -> np.ndarray:
        """Distancias euclidianas entre filas de `locations`, en el layout de aristas."""
        X = np.asarray(locations, dtype=np.float64)
        if X.shape[0] != self.k:
            raise InstanceError("locations must have one row per city", expected=self.k, received=X.shape[0])
        diff = X[:, None, :] - X[None, :, :]
        return np.sqrt((diff ** 2).sum(axis=-1))[self._iu]

    def tour_to_indicator(self, tour: Sequence[int]) -> np.ndarray:
        ind = np.zeros(self.size, dtype=np.int8)
        for a, b in zip(tour, list(tour[1:]) + [tour[0]]):
            ind[self.index(a, b)] = 1
        return ind

    def indicator_to_tour(self, indicator: np.ndarray) -> List[int]:
        """Recorre el ciclo desde la ciudad 0 hacia su vecino de menor índice."""
        adj: Dict[int, List[int]] = {i: [] for i in range(self.k)}
        for n in np.flatnonzero(np.asarray(indicator).reshape(-1)):
            i, j = self.edges[int(n)]
            adj[i].append(j)
            adj[j].append(i)
        tour = [0]
        prev, cur = None, 0
        while len(tour) <= self.k:
            nxt = [v for v in sorted(adj[cur]) if v != prev]
            if not nxt or nxt[0] == 0:
                break
            prev, cur = cur, nxt[0]
            tour.append(cur)
        return tour

    def is_tour(self, indicator: np.ndarray) -> bool:
        ind = np.asarray(indicator).reshape(-1)
        if ind.shape[0] != self.size or not np.all((ind == 0) | (ind == 1)):
            return False
        if int(ind.sum()) != self.k:
            return False
        deg = np.zeros(self.k, dtype=np.int64)
        for n in np.flatnonzero(ind):
            i, j = self.edges[int(n)]
            deg[i] += 1
            deg[j] += 1
        if not np.all(deg == 2):
            return False
        return len(self.indicator_to_tour(ind)) == self.k


def _held_karp(D: np.ndarray) -> List[int]:
    """
    DP de Held-Karp con la ciudad 0 fija como inicio.

    Estado (mask, j): mejor camino 0 -> ... -> j+1 que visita el conjunto
    `mask` de las ciudades 1..k-1. Las capas se procesan por cardinalidad
    y cada capa se vectoriza por ciudad final. Empates: menor predecesor,
    luego menor ciudad de cierre (argmin de numpy).
    """
    k = D.shape[0]
    n = k - 1
    full = (1 << n) - 1
    sub = D[1:, 1:]

    dp = np.full((1 << n, n), np.inf)
    parent = np.full((1 << n, n), -1, dtype=np.int8)
    for j in range(n):
        dp[1 << j, j] = D[0, j + 1]

    masks = np.arange(1 << n)
    popcount = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        popcount += (masks >> b) & 1

    for size in range(2, n + 1):
        layer = masks[popcount == size]
        for j in range(n):
            sel = layer[((layer >> j) & 1) == 1]
            prev = sel ^ (1 << j)
            cand = dp[prev] + sub[:, j]
            best = np.argmin(cand, axis=1)
            dp[sel, j] = cand[np.arange(len(sel)), best]
            parent[sel, j] = best

    closing = dp[full] + D[1:, 0]
    j = int(np.argmin(closing))
    tour = [0]
    mask = full
    while j != -1:
        tour.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    return tour


def tsp_exact(instance: TspInstance, dist) -> Solution:
    w = as_weights(dist, instance.size, name="dist")
    if instance.k > EXACT_MAX_K:
        raise CapacityError(
            "exact TSP is limited by the Held-Karp guard; use tsp_approx",
            k=instance.k,
            guard=EXACT_MAX_K,
        )
    if instance.k == 3:
        tour = [0, 1, 2]
    else:
        tour = _held_karp(instance.matrix(w))
    ind = instance.tour_to_indicator(tour)
    return Solution(indicator=ind, objective=objective(w, ind))


def _nearest_neighbor(D: np.ndarray) -> List[int]:
    k = D.shape[0]
    tour = [0]
    unvisited = list(range(1, k))
    while unvisited:
        cur = tour[-1]
        nxt = min(unvisited, key=lambda c: (D[cur, c], c))
        tour.append(nxt)
        unvisited.remove(nxt)
    return tour


def _two_opt(tour: List[int], D: np.ndarray) -> List[int]:
    """Primer movimiento que mejora, repetido hasta que ninguno mejora."""
    k = len(tour)
    improved = True
    while improved:
        improved = False
        for i in range(1, k - 1):
            for j in range(i + 1, k):
                a, b = tour[i - 1], tour[i]
                c, d = tour[j], tour[(j + 1) % k]
                if a == d:
                    continue
                delta = D[a, c] + D[b, d] - D[a, b] - D[c, d]
                if delta < -1e-12:
                    tour[i:j + 1] = tour[i:j + 1][::-1]
                    improved = True
    return tour


def tsp_approx(instance: TspInstance, dist) -> Solution:
    w = as_weights(dist, instance.size, name="dist")
    D = instance.matrix(w)
    tour = _two_opt(_nearest_neighbor(D), D)
    ind = instance.tour_to_indicator(tour)
    return Solution(indicator=ind, objective=objective(w, ind))


class TravelingSalesman(SolverHandle):
    family = "tsp"

    def __init__(self, instance: TspInstance, approximate: bool = False):
        self.instance = instance
        self.exact = not approximate
        if not approximate and instance.k > EXACT_MAX_K:
            raise CapacityError(
                "exact TSP is limited by the Held-Karp guard; use the approximate solver",
                k=instance.k,
                guard=EXACT_MAX_K,
            )
        if approximate:
            logger.debug("TSP(k=%d) using nearest-neighbour + 2-opt", instance.k)

    @property
    def size(self) -> int:
        return self.instance.size

    def _solve(self, w: np.ndarray) -> np.ndarray:
        if self.exact:
            return tsp_exact(self.instance, w).indicator
        return tsp_approx(self.instance, w).indicator

    def feasible(self, indicator: np.ndarray) -> bool:
        return self.instance.is_tour(indicator)

    def enumerate(self) -> Iterator[np.ndarray]:
        k = self.instance.k
        if k > ENUMERATE_MAX_K:
            raise CapacityError("tour enumeration is limited to small k", k=k, guard=ENUMERATE_MAX_K)
        # ciudad 0 fija y un solo sentido de recorrido por tour
        return (
            self.instance.tour_to_indicator((0,) + perm)
            for perm in itertools.permutations(range(1, k))
            if perm[0] < perm[-1]
        )

    def describe(self):
        info = super().describe()
        info["k"] = self.instance.k
        return info
