from logging import warning as log_warning

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .matrix import EmbeddingMatrix

_BLOCK = 1024

CandidateList = list[tuple[int, float]]


class CslsConfig(BaseModel):
	model_config = ConfigDict(extra='forbid', frozen=True)

	neighborhood_k: int = Field(10, ge=1)


def _unit_rows(matrix: EmbeddingMatrix, side: str) -> np.ndarray:
	norms = np.linalg.norm(matrix.rows, axis=1, keepdims=True)
	zero = np.flatnonzero(norms[:, 0] == 0)
	if len(zero) > 0:
		log_warning(
			f'CSLS: {len(zero)} zero-norm {side} vectors treated as cosine 0, e.g. {[matrix.ids[i] for i in zero[:5]]}'
		)
	return np.divide(matrix.rows, norms, out=np.zeros_like(matrix.rows), where=norms > 0)


def _mean_topk(left: np.ndarray, right: np.ndarray, k: int) -> np.ndarray:
	'''
	Mean of the k largest cosines from every row of `left` to the rows of `right`.
	'''
	out = np.empty(left.shape[0])
	for start in range(0, left.shape[0], _BLOCK):
		sims = left[start:start + _BLOCK] @ right.T
		top = np.partition(sims, sims.shape[1] - k, axis=1)[:, -k:]
		out[start:start + _BLOCK] = top.mean(axis=1)
	return out


class CslsIndex:
	'''
	Cached unit vectors and neighbourhood radii of a (source, target) pair, so
	every query costs one matrix-vector product.

	CSLS(x, y) = 2 cos(x, y) - r_tgt(x) - r_src(y)
	'''
	def __init__(self, src: EmbeddingMatrix, tgt: EmbeddingMatrix, cfg: CslsConfig | None = None):
		cfg = cfg or CslsConfig()
		k = cfg.neighborhood_k
		if k >= len(tgt):
			raise ValueError(f'CSLS neighbourhood k={k} must be smaller than the {len(tgt)} target entities')
		if k > len(src):
			raise ValueError(f'CSLS neighbourhood k={k} exceeds the {len(src)} source entities')
		if src.dim != tgt.dim:
			raise ValueError(f'source and target dims differ: {src.dim} != {tgt.dim}')

		self.src = src
		self.tgt = tgt
		self.k = k
		self._u_src = _unit_rows(src, 'source')
		self._u_tgt = _unit_rows(tgt, 'target')
		self.r_tgt = _mean_topk(self._u_src, self._u_tgt, k)
		self.r_src = _mean_topk(self._u_tgt, self._u_src, k)
		self._tgt_ids = np.asarray(tgt.ids, dtype=np.int64)

	def scores(self, query: int) -> np.ndarray:
		'''
		CSLS of source entity `query` against every target, in target row order.
		'''
		row = self.src.index[query]
		return 2 * (self._u_tgt @ self._u_src[row]) - self.r_tgt[row] - self.r_src

	def _order(self, scores: np.ndarray) -> np.ndarray:
		# primary key: score descending, then id ascending
		return np.lexsort((self._tgt_ids, -scores))

	def ranking(self, query: int) -> list[int]:
		return [int(self._tgt_ids[i]) for i in self._order(self.scores(query))]

	def topk(self, query: int, scope: int) -> CandidateList:
		if scope < 1:
			raise ValueError('scope must be at least 1')
		scores = self.scores(query)
		order = self._order(scores)[:scope]
		return [(int(self._tgt_ids[i]), float(scores[i])) for i in order]

	def rank_of(self, query: int, gold: int) -> int:
		'''
		1-based position of `gold` in the ranking of `query`.
		'''
		scores = self.scores(query)
		pos = int(np.flatnonzero(self._tgt_ids == gold)[0])
		better = np.sum(scores > scores[pos]) + np.sum((scores == scores[pos]) & (self._tgt_ids < gold))
		return int(better) + 1


def csls_topk(
	src: EmbeddingMatrix,
	tgt: EmbeddingMatrix,
	query: int,
	scope: int,
	cfg: CslsConfig | None = None,
) -> CandidateList:
	'''
	The `scope` best targets of source entity `query` as (id, score) pairs,
	strictly ordered with ties broken by ascending id.
	'''
	return CslsIndex(src, tgt, cfg).topk(query, scope)
