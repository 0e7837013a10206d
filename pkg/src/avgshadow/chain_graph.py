"""Finite chain-dynamics surrogates: epsilon-net discretization, delta-chain
reachability graphs, and decision procedures for chain transitivity and chain
mixing.

A ``True`` answer always means "at this (epsilon, delta, net)", never a
statement quantified over all delta.  Chain lengths and the mixing threshold
M are counted in steps (edges); a chain visiting n points has n - 1 steps.
"""

import random
from dataclasses import dataclass

import numpy as np

from .systems.base import SystemHandle
from .tracing import mixing_witness


@dataclass
class ChainGraph:
    nodes: list
    adjacency: np.ndarray  # bool, adjacency[i, j] iff rho(T(n_i), n_j) <= delta
    epsilon: float
    delta: float
    seed: object
    system_name: str

    @property
    def size(self) -> int:
        return len(self.nodes)

    def to_json_dict(self, system=None) -> dict:
        ids = (
            [system.point_id(p) for p in self.nodes]
            if system is not None
            else [str(p) for p in self.nodes]
        )
        return {
            "system": self.system_name,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "seed": self.seed,
            "nodes": ids,
            "edges": [
                [int(i), int(j)]
                for i, j in zip(*np.nonzero(self.adjacency))
            ],
        }

    def to_adjacency_text(self) -> str:
        lines = []
        for i in range(self.size):
            succ = " ".join(str(int(j)) for j in np.nonzero(self.adjacency[i])[0])
            lines.append(f"{i}: {succ}")
        return "\n".join(lines) + "\n"


def _edge_matrix(system: SystemHandle, nodes, delta: float) -> np.ndarray:
    n = len(nodes)
    adj = np.zeros((n, n), dtype=bool)
    images = [system.step(p) for p in nodes]
    for i in range(n):
        for j in range(n):
            # closed threshold: on dyadic-valued metrics the natural hop at
            # scale exactly delta must count as an edge
            adj[i, j] = system.metric(images[i], nodes[j]) <= delta
    return adj


def build_chain_graph(
    system: SystemHandle, epsilon: float, delta: float, sample_budget: int, seed: int = 0
) -> ChainGraph:
    """Greedy farthest-point epsilon-net over sampled points, then a full
    edge scan.  Deterministic given the seed."""
    if sample_budget < 2:
        raise ValueError("sample budget must be >= 2")
    rng = random.Random(seed)
    samples = [system.sample(rng) for _ in range(sample_budget)]
    nodes = [samples[0]]
    dist = np.array([system.metric(s, nodes[0]) for s in samples])
    while dist.max() > epsilon:
        idx = int(dist.argmax())
        nodes.append(samples[idx])
        newd = np.array([system.metric(s, nodes[-1]) for s in samples])
        dist = np.minimum(dist, newd)
    return ChainGraph(
        nodes=nodes,
        adjacency=_edge_matrix(system, nodes, delta),
        epsilon=epsilon,
        delta=delta,
        seed=seed,
        system_name=system.name,
    )


def chain_graph_from_points(system: SystemHandle, points, delta: float) -> ChainGraph:
    """Chain graph over an explicitly given node set (no net construction)."""
    nodes = list(points)
    if not nodes:
        raise ValueError("need at least one node")
    return ChainGraph(
        nodes=nodes,
        adjacency=_edge_matrix(system, nodes, delta),
        epsilon=0.0,
        delta=delta,
        seed=None,
        system_name=system.name,
    )


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def _reachability_closure(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    reach = adj | np.eye(n, dtype=bool)
    while True:
        nxt = _bool_matmul(reach, reach)
        if (nxt == reach).all():
            return reach
        reach = nxt


def is_chain_transitive(graph: ChainGraph) -> bool:
    """Strong connectivity of the chain graph (finite surrogate)."""
    reach = _reachability_closure(graph.adjacency)
    return bool(reach.all())


def _graph_period(adj: np.ndarray) -> int:
    """gcd of cycle lengths of a strongly connected graph (BFS levels)."""
    import math

    n = adj.shape[0]
    level = -np.ones(n, dtype=np.int64)
    level[0] = 0
    queue = [0]
    while queue:
        u = queue.pop()
        for v in np.nonzero(adj[u])[0]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
    g = 0
    for u, v in zip(*np.nonzero(adj)):
        g = math.gcd(g, int(level[u]) + 1 - int(level[v]))
    return abs(g)


@dataclass
class MixingDecision:
    holds: bool
    least_steps: object  # least M (in steps) or None
    max_steps: int
    aperiodicity_route: bool
    routes_agree: bool

    def to_json_dict(self):
        return {
            "holds": self.holds,
            "least_M": self.least_steps,
            "M_max": self.max_steps,
            "aperiodicity_route": self.aperiodicity_route,
            "routes_agree": self.routes_agree,
        }


def is_chain_mixing(graph: ChainGraph, max_steps: int) -> MixingDecision:
    """Chain mixing on the finite graph, decided two ways and cross-checked.

    Route one: boolean matrix powers; holds iff some M <= max_steps connects
    every ordered pair by chains of every step count in [M, max_steps].
    Route two: strong connectivity plus aperiodicity of the edge relation.
    The routes can only disagree when max_steps is too small for the least M,
    which ``routes_agree`` reflects.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    adj = graph.adjacency
    power = adj.copy()
    all_ones = [bool(power.all())]
    for _ in range(max_steps - 1):
        power = _bool_matmul(power, adj)
        all_ones.append(bool(power.all()))
    least = None
    for m in range(1, max_steps + 1):
        if all(all_ones[m - 1 :]):
            least = m
            break
    holds = least is not None
    transitive = is_chain_transitive(graph)
    aperiodic_route = transitive and _graph_period(adj) == 1
    return MixingDecision(
        holds=holds,
        least_steps=least,
        max_steps=max_steps,
        aperiodicity_route=aperiodic_route,
        routes_agree=holds == aperiodic_route,
    )


@dataclass
class MixingProbeRow:
    source_word: bytes
    target_word: bytes
    witnessed_steps: list
    threshold: int
    cofinite_verified: bool


def topological_mixing_probe(system, word_pairs, max_steps: int):
    """For cylinder-set pairs (u, v), the step counts n <= max_steps at which
    the constructive witness lands in [u] and maps into [v].

    On the full shift the witnessed set is co-finite with threshold |u|,
    which is verified per row.
    """
    rows = []
    for u, v in word_pairs:
        u = bytes(u)
        v = bytes(v)
        if not u or not v:
            raise ValueError("cylinder words must be nonempty")
        witnessed = []
        for n in range(1, max_steps + 1):
            w = mixing_witness(system, u, v, n)
            if w.available:
                witnessed.append(n)
        expected = list(range(len(u), max_steps + 1))
        overlap = [n for n in witnessed if n >= len(u)]
        rows.append(
            MixingProbeRow(
                source_word=u,
                target_word=v,
                witnessed_steps=witnessed,
                threshold=len(u),
                cofinite_verified=overlap == expected,
            )
        )
    return rows
