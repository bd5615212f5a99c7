from logging import info as log_info

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..kg import KnowledgeGraph


class WalkConfig(BaseModel):
	model_config = ConfigDict(extra='forbid', frozen=True)

	walks_per_node: int = Field(10, ge=1)
	walk_length: int = Field(20, ge=1)
	p: float = Field(1.0, gt=0)
	q: float = Field(1.0, gt=0)
	window: int = Field(5, ge=1)
	negatives: int = Field(5, ge=1)
	epochs: int = Field(5, ge=1)
	learning_rate: float = Field(0.025, gt=0)
	seed: int = 0


def kg_graph(kg: KnowledgeGraph) -> nx.Graph:
	graph = nx.Graph()
	graph.add_nodes_from(kg.entity_ids)
	graph.add_edges_from((f.head, f.tail) for f in kg.facts)
	return graph


def joint_graph(
	kg1: KnowledgeGraph,
	kg2: KnowledgeGraph,
	train_pairs: tuple[tuple[int, int], ...] | list[tuple[int, int]],
) -> tuple[nx.Graph, dict[int, int], dict[int, int]]:
	'''
	Union of both KGs on one node space where each training anchor pair is
	merged into a single node, so walks cross between the graphs.

	Returns
	-------
	(graph, node_of_kg1_entity, node_of_kg2_entity)
	'''
	nodes1 = {e: i for i, e in enumerate(kg1.entity_ids)}
	offset = len(nodes1)
	merged = dict(train_pairs)
	partner = {right: left for left, right in merged.items()}

	nodes2 = {}
	for j, e in enumerate(kg2.entity_ids):
		nodes2[e] = nodes1[partner[e]] if e in partner else offset + j

	graph = nx.Graph()
	graph.add_nodes_from(nodes1.values())
	graph.add_nodes_from(nodes2.values())
	graph.add_edges_from((nodes1[f.head], nodes1[f.tail]) for f in kg1.facts)
	graph.add_edges_from((nodes2[f.head], nodes2[f.tail]) for f in kg2.facts)
	return graph, nodes1, nodes2


def transition_weights(graph: nx.Graph, prev: int | None, cur: int, p: float, q: float) -> tuple[list, np.ndarray]:
	'''
	Unnormalised second-order weights from `cur`: 1/p back to `prev`, 1 to
	nodes adjacent to `prev`, 1/q to nodes two hops from `prev`.
	'''
	candidates = sorted(graph.neighbors(cur))
	if prev is None:
		return candidates, np.ones(len(candidates))

	weights = np.empty(len(candidates))
	for i, x in enumerate(candidates):
		if x == prev:
			weights[i] = 1.0 / p
		elif graph.has_edge(x, prev):
			weights[i] = 1.0
		else:
			weights[i] = 1.0 / q
	return candidates, weights


def biased_walks(source: KnowledgeGraph | nx.Graph, cfg: WalkConfig) -> list[list[int]]:
	'''
	`walks_per_node` second-order random walks from every node, each of
	`walk_length` nodes unless it hits a dead end. Seeded and reproducible.
	'''
	graph = kg_graph(source) if isinstance(source, KnowledgeGraph) else source
	rng = np.random.default_rng(cfg.seed)
	nodes = sorted(graph.nodes)

	corpus: list[list[int]] = []
	for _ in range(cfg.walks_per_node):
		for start in nodes:
			walk = [start]
			while len(walk) < cfg.walk_length:
				prev = walk[-2] if len(walk) > 1 else None
				candidates, weights = transition_weights(graph, prev, walk[-1], cfg.p, cfg.q)
				if len(candidates) == 0:
					break
				cumulative = np.cumsum(weights)
				pick = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side='right'))
				walk.append(candidates[min(pick, len(candidates) - 1)])
			corpus.append(walk)

	log_info(f'generated {len(corpus)} walks over {len(nodes)} nodes')
	return corpus
