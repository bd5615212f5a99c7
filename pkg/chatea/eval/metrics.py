import math
from collections.abc import Iterable, Mapping, Sequence
from typing import Protocol

from ..features import CslsIndex


class Ranked(Protocol):
	target: int
	final_ranking: list[int]


def rank_of(ranking: Sequence[int], gold: int) -> float:
	'''
	1-based position of `gold`, infinity when it is absent.
	'''
	for i, e in enumerate(ranking):
		if e == gold:
			return float(i + 1)
	return math.inf


def gold_ranks(results: Iterable[Ranked], gold: Mapping[int, int]) -> list[float]:
	'''
	Gold rank per result; a result whose target has no gold entity counts as a miss.
	'''
	return [
		rank_of(r.final_ranking, gold[r.target]) if r.target in gold else math.inf
		for r in results
	]


def hits_from_ranks(ranks: Sequence[float], k: int) -> float:
	if k < 1:
		raise ValueError(f'k must be at least 1, got {k}')
	if len(ranks) == 0:
		return 0.0
	return sum(1 for r in ranks if r <= k) / len(ranks)


def mrr_from_ranks(ranks: Sequence[float]) -> float:
	if len(ranks) == 0:
		return 0.0
	return sum(1.0 / r for r in ranks) / len(ranks)


def hits_at_k(results: Iterable[Ranked], gold: Mapping[int, int], k: int) -> float:
	'''
	Fraction of targets whose gold entity is among the first `k` of their final ranking.
	'''
	return hits_from_ranks(gold_ranks(results, gold), k)


def mrr(results: Iterable[Ranked], gold: Mapping[int, int]) -> float:
	'''
	Mean reciprocal gold rank, a missing gold contributes 0.
	'''
	return mrr_from_ranks(gold_ranks(results, gold))


def gold_outside_topk(index: CslsIndex, pairs: Sequence[tuple[int, int]], k: int = 20) -> float:
	'''
	Fraction of test pairs whose gold entity falls outside the CSLS top-k, so
	that no amount of reasoning over k candidates can recover it.
	'''
	if len(pairs) == 0:
		return 0.0
	return sum(1 for left, right in pairs if index.rank_of(left, right) > k) / len(pairs)


def embedding_hits(index: CslsIndex, pairs: Sequence[tuple[int, int]], k: int = 1) -> float:
	'''
	Hits@k of the raw CSLS ranking, no reasoning involved.
	'''
	if len(pairs) == 0:
		return 0.0
	return sum(1 for left, right in pairs if index.rank_of(left, right) <= k) / len(pairs)
