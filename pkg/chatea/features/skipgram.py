from logging import warning as log_warning

import numpy as np
from tqdm import tqdm

from .matrix import EmbeddingMatrix
from .walks import WalkConfig

_BATCH = 1024


def context_pairs(corpus: list[list[int]], index: dict[int, int], window: int) -> np.ndarray:
	'''
	(center, context) row pairs of every position within `window` of each other.
	'''
	pairs = []
	for walk in corpus:
		rows = [index[node] for node in walk]
		for i, center in enumerate(rows):
			for j in range(max(0, i - window), min(len(rows), i + window + 1)):
				if j != i:
					pairs.append((center, rows[j]))
	return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def _sigmoid(x: np.ndarray) -> np.ndarray:
	return 0.5 * (1.0 + np.tanh(0.5 * x))


def train_skipgram(
	corpus: list[list[int]],
	node_ids: tuple[int, ...] | list[int],
	dim: int,
	cfg: WalkConfig,
	disable_progress: bool | None = None,
) -> EmbeddingMatrix:
	'''
	Skip-gram with negative sampling over sliding windows of the walk corpus.

	Negatives are drawn from the unigram distribution raised to 3/4. Nodes
	that never appear in the corpus get a zero row.
	'''
	if len(corpus) == 0:
		raise ValueError('empty walk corpus')

	ids = tuple(node_ids)
	index = {node: i for i, node in enumerate(ids)}
	rng = np.random.default_rng(cfg.seed)

	w_in = (rng.random((len(ids), dim)) - 0.5) / dim
	w_out = np.zeros((len(ids), dim))

	counts = np.zeros(len(ids))
	for walk in corpus:
		for node in walk:
			counts[index[node]] += 1

	absent = np.flatnonzero(counts == 0)
	if len(absent) > 0:
		log_warning(
			f'skip-gram: {len(absent)} nodes never occur in the walk corpus, '
			f'e.g. {[ids[i] for i in absent[:5]]}'
		)

	pairs = context_pairs(corpus, index, cfg.window)
	noise = counts ** 0.75
	noise = noise / noise.sum()

	for epoch in tqdm(range(cfg.epochs), desc='skip-gram', disable=disable_progress):
		lr = cfg.learning_rate * (1.0 - epoch / cfg.epochs)
		order = rng.permutation(len(pairs))
		for start in range(0, len(order), _BATCH):
			batch = pairs[order[start:start + _BATCH]]
			if len(batch) == 0:
				continue
			centers, contexts = batch[:, 0], batch[:, 1]
			negatives = rng.choice(len(ids), size=(len(batch), cfg.negatives), p=noise)

			targets = np.concatenate([contexts[:, None], negatives], axis=1)
			labels = np.zeros(targets.shape)
			labels[:, 0] = 1.0

			h = w_in[centers]
			out = w_out[targets]
			scores = np.einsum('bd,bkd->bk', h, out)
			g = (labels - _sigmoid(scores)) * lr

			grad_in = np.einsum('bk,bkd->bd', g, out)
			grad_out = g[:, :, None] * h[:, None, :]
			np.add.at(w_out, targets.reshape(-1), grad_out.reshape(-1, dim))
			np.add.at(w_in, centers, grad_in)

	w_in[absent] = 0.0
	return EmbeddingMatrix(ids, w_in)
