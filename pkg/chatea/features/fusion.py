'''
Multi-view fusion: one learned linear projection per view, shared by both
KGs, concatenated into the entity representation and trained with a
margin-ranking loss over anchor pairs. Gradients are analytic.
'''
from dataclasses import dataclass
from logging import info as log_info
from logging import warning as log_warning
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from ..errors import TrainingDivergedError
from .matrix import EmbeddingMatrix

Views = dict[str, EmbeddingMatrix]
Params = dict[str, np.ndarray]

_EPS = 1e-12


class TrainConfig(BaseModel):
	model_config = ConfigDict(extra='forbid', frozen=True)

	margin: float = Field(1.0, gt=0)
	learning_rate: float = Field(0.001, gt=0)
	epochs: int = Field(20, ge=0)
	negatives_per_positive: int = Field(5, ge=1)
	batch_size: int = Field(512, ge=1)
	seed: int = 0
	dim: int = Field(64, ge=1)
	distance: Literal['csls', 'euclidean'] = 'csls'
	csls_k: int = Field(10, ge=1)


def normalize_rows(x: np.ndarray) -> np.ndarray:
	norms = np.linalg.norm(x, axis=1, keepdims=True)
	return np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)


@dataclass
class FusionModel:
	view_order: tuple[str, ...]
	params: Params

	@classmethod
	def init(cls, raw_dims: dict[str, int], out_dims: dict[str, int]) -> 'FusionModel':
		order = tuple(raw_dims)
		return cls(order, {v: np.eye(raw_dims[v], out_dims[v]) for v in order})

	@property
	def slices(self) -> dict[str, slice]:
		out, start = {}, 0
		for v in self.view_order:
			width = self.params[v].shape[1]
			out[v] = slice(start, start + width)
			start += width
		return out

	@property
	def dim(self) -> int:
		return sum(self.params[v].shape[1] for v in self.view_order)

	def forward(self, raw: dict[str, np.ndarray], params: Params | None = None) -> np.ndarray:
		params = params or self.params
		return np.concatenate([raw[v] @ params[v] for v in self.view_order], axis=1)

	def transform(self, views: Views) -> EmbeddingMatrix:
		ids = views[self.view_order[0]].ids
		raw = {v: normalize_rows(views[v].rows) for v in self.view_order}
		return EmbeddingMatrix(ids, self.forward(raw))


class _CosineGrads:
	'''
	Accumulates d(loss)/d(embedding) for terms alpha * cos(a, b).
	'''
	def __init__(self, h1: np.ndarray, h2: np.ndarray):
		self.h = (h1, h2)
		self.norm = tuple(np.maximum(np.linalg.norm(h, axis=1), _EPS) for h in self.h)
		self.unit = tuple(h / n[:, None] for h, n in zip(self.h, self.norm, strict=True))
		self.grad = (np.zeros_like(h1), np.zeros_like(h2))

	def add(self, side_a: int, idx_a: np.ndarray, side_b: int, idx_b: np.ndarray, alpha: np.ndarray) -> None:
		ua, ub = self.unit[side_a][idx_a], self.unit[side_b][idx_b]
		cos = np.sum(ua * ub, axis=1, keepdims=True)
		a = alpha[:, None]
		np.add.at(self.grad[side_a], idx_a, a * (ub - cos * ua) / self.norm[side_a][idx_a][:, None])
		np.add.at(self.grad[side_b], idx_b, a * (ua - cos * ub) / self.norm[side_b][idx_b][:, None])


def _knn_sources(unit2_rows: np.ndarray, unit1: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
	'''
	For each row: indexes of its k most similar KG1 rows and the mean cosine.
	'''
	sims = unit2_rows @ unit1.T
	k = min(k, unit1.shape[0])
	top = np.argpartition(-sims, k - 1, axis=1)[:, :k]
	return top, np.take_along_axis(sims, top, axis=1).mean(axis=1)


def margin_loss_and_grad(
	h1: np.ndarray,
	h2: np.ndarray,
	triples: np.ndarray,
	cfg: TrainConfig,
) -> tuple[float, np.ndarray, np.ndarray]:
	'''
	Mean over triples (i, pos, neg) of max(0, margin + d(i, pos) - d(i, neg)).

	With the CSLS distance d(x, y) = -(2 cos(x, y) - r_tgt(x) - r_src(y)), the
	r_tgt(x) terms cancel inside the hinge; r_src(y) keeps its dependence on
	the KG1 rows of y's neighbourhood.

	Returns
	-------
	(loss, d loss / d h1, d loss / d h2)
	'''
	i, pos, neg = triples[:, 0], triples[:, 1], triples[:, 2]
	weight = 1.0 / len(triples)

	if cfg.distance == 'euclidean':
		d_pos_vec = h1[i] - h2[pos]
		d_neg_vec = h1[i] - h2[neg]
		d_pos = np.sqrt(np.sum(d_pos_vec ** 2, axis=1) + _EPS)
		d_neg = np.sqrt(np.sum(d_neg_vec ** 2, axis=1) + _EPS)
		pre = cfg.margin + d_pos - d_neg
		active = pre > 0

		g1, g2 = np.zeros_like(h1), np.zeros_like(h2)
		gp = weight * d_pos_vec[active] / d_pos[active][:, None]
		gn = weight * d_neg_vec[active] / d_neg[active][:, None]
		np.add.at(g1, i[active], gp - gn)
		np.add.at(g2, pos[active], -gp)
		np.add.at(g2, neg[active], gn)
		return float(np.sum(pre[active]) * weight), g1, g2

	acc = _CosineGrads(h1, h2)
	unit1, unit2 = acc.unit
	cos_pos = np.sum(unit1[i] * unit2[pos], axis=1)
	cos_neg = np.sum(unit1[i] * unit2[neg], axis=1)

	targets = np.unique(np.concatenate([pos, neg]))
	knn, r_src = _knn_sources(unit2[targets], unit1, cfg.csls_k)
	where = {int(t): n for n, t in enumerate(targets)}
	slot_pos = np.array([where[int(t)] for t in pos], dtype=np.int64)
	slot_neg = np.array([where[int(t)] for t in neg], dtype=np.int64)

	pre = cfg.margin - 2 * cos_pos + 2 * cos_neg + r_src[slot_pos] - r_src[slot_neg]
	active = np.flatnonzero(pre > 0)
	if len(active) == 0:
		return 0.0, acc.grad[0], acc.grad[1]

	ia, pa, na = i[active], pos[active], neg[active]
	ones = np.full(len(active), weight)
	acc.add(0, ia, 1, pa, -2 * ones)
	acc.add(0, ia, 1, na, 2 * ones)

	k = knn.shape[1]
	for sign, targets_active, slots in ((1.0, pa, slot_pos[active]), (-1.0, na, slot_neg[active])):
		neigh = knn[slots]
		acc.add(
			1, np.repeat(targets_active, k),
			0, neigh.reshape(-1),
			np.full(neigh.size, sign * weight / k),
		)

	return float(np.sum(pre[active]) * weight), acc.grad[0], acc.grad[1]


def param_grads(
	model: FusionModel,
	raw1: dict[str, np.ndarray],
	raw2: dict[str, np.ndarray],
	g1: np.ndarray,
	g2: np.ndarray,
) -> Params:
	slices = model.slices
	return {v: raw1[v].T @ g1[:, slices[v]] + raw2[v].T @ g2[:, slices[v]] for v in model.view_order}


def loss_and_param_grads(
	model: FusionModel,
	raw1: dict[str, np.ndarray],
	raw2: dict[str, np.ndarray],
	triples: np.ndarray,
	cfg: TrainConfig,
	params: Params | None = None,
) -> tuple[float, Params]:
	params = params or model.params
	h1, h2 = model.forward(raw1, params), model.forward(raw2, params)
	loss, g1, g2 = margin_loss_and_grad(h1, h2, triples, cfg)
	probe = FusionModel(model.view_order, params)
	return loss, param_grads(probe, raw1, raw2, g1, g2)


def sample_triples(
	positives: np.ndarray,
	n_targets: int,
	negatives: int,
	rng: np.random.Generator,
) -> np.ndarray:
	'''
	`negatives` corruptions of each positive's target, drawn uniformly from the
	targets no training anchor claims. When every target is claimed they come
	from all targets but the positive's own; a single target yields no triples.
	'''
	left = np.repeat(positives[:, 0], negatives)
	right = np.repeat(positives[:, 1], negatives)
	pool = np.setdiff1d(np.arange(n_targets), positives[:, 1])
	if len(pool) > 0:
		return np.stack([left, right, rng.choice(pool, size=len(left))], axis=1)
	if n_targets < 2:
		return np.empty((0, 3), dtype=np.int64)

	neg = rng.integers(0, n_targets - 1, size=len(left))
	neg = neg + (neg >= right)
	return np.stack([left, right, neg], axis=1)


def fuse_and_train(
	views1: Views,
	views2: Views,
	anchors_train: list[tuple[int, int]] | tuple[tuple[int, int], ...],
	out_dims: dict[str, int],
	cfg: TrainConfig,
	disable_progress: bool | None = None,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix, FusionModel]:
	'''
	Concatenates per-view projections of both KGs and trains the projections
	with Adam on the margin-ranking loss.

	Args
	----
	views1, views2: dict[str, EmbeddingMatrix]
		Raw views per KG, same view names and entity indexing within a KG
	anchors_train: list of (KG1 entity, KG2 entity)
	out_dims: dict[str, int]
		Output width of every view's projection

	Returns
	-------
	(h_mul of KG1, h_mul of KG2, trained model)
	'''
	if tuple(views1) != tuple(views2):
		raise ValueError('both KGs need the same views')
	if len(anchors_train) == 0:
		raise ValueError('fusion training needs at least one training anchor')

	raw1 = {v: normalize_rows(m.rows) for v, m in views1.items()}
	raw2 = {v: normalize_rows(m.rows) for v, m in views2.items()}
	model = FusionModel.init({v: m.shape[1] for v, m in raw1.items()}, out_dims)

	ids1 = views1[model.view_order[0]].ids
	ids2 = views2[model.view_order[0]].ids
	index1 = views1[model.view_order[0]].index
	index2 = views2[model.view_order[0]].index
	positives = np.array([(index1[a], index2[b]) for a, b in anchors_train], dtype=np.int64)

	rng = np.random.default_rng(cfg.seed)
	first = {v: np.zeros_like(w) for v, w in model.params.items()}
	second = {v: np.zeros_like(w) for v, w in model.params.items()}
	beta1, beta2, step = 0.9, 0.999, 0

	for epoch in tqdm(range(cfg.epochs), desc='fusion', disable=disable_progress):
		triples = sample_triples(positives, len(ids2), cfg.negatives_per_positive, rng)
		if len(triples) == 0:
			log_warning('fusion: a single target leaves no negatives, keeping the initial projections')
			break
		triples = triples[rng.permutation(len(triples))]
		epoch_loss = 0.0

		for start in range(0, len(triples), cfg.batch_size):
			batch = triples[start:start + cfg.batch_size]
			loss, grads = loss_and_param_grads(model, raw1, raw2, batch, cfg)
			if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads.values()):
				raise TrainingDivergedError(f'non-finite loss {loss} at epoch {epoch}, batch starting {start}')

			step += 1
			for v, g in grads.items():
				first[v] = beta1 * first[v] + (1 - beta1) * g
				second[v] = beta2 * second[v] + (1 - beta2) * g * g
				m_hat = first[v] / (1 - beta1 ** step)
				v_hat = second[v] / (1 - beta2 ** step)
				model.params[v] = model.params[v] - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + 1e-8)
			epoch_loss += loss * len(batch)

		log_info(f'fusion epoch {epoch}: mean hinge loss {epoch_loss / len(triples):.6f}')

	h1 = EmbeddingMatrix(ids1, model.forward(raw1))
	h2 = EmbeddingMatrix(ids2, model.forward(raw2))
	return h1, h2, model
