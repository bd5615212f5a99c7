import math

import numpy as np

from .matrix import EmbeddingMatrix


def noise_dims(dim: int, ratio: float, seed: int) -> np.ndarray:
	'''
	The floor(ratio * dim) dimensions that `inject_noise` overwrites, sorted.
	'''
	if not 0.0 <= ratio <= 1.0:
		raise ValueError(f'noise ratio must be within [0, 1], got {ratio}')
	count = math.floor(ratio * dim)
	rng = np.random.default_rng(seed)
	return np.sort(rng.choice(dim, size=count, replace=False))


def inject_noise(
	emb: EmbeddingMatrix,
	ratio: float,
	seed: int,
	dims: np.ndarray | None = None,
) -> EmbeddingMatrix:
	'''
	Replaces the chosen dimensions with uniform noise drawn from each
	dimension's own [min, max] over all entities.

	Args
	----
	emb: EmbeddingMatrix
	ratio: float
		Fraction of dimensions to overwrite
	seed: int
		Seeds both the dimension choice and the noise values
	dims: np.ndarray, optional
		Explicit dimensions, e.g. to hit the same columns of both KGs
	'''
	if dims is None:
		dims = noise_dims(emb.dim, ratio, seed)
	rows = emb.rows.copy()
	if len(dims) == 0 or len(emb) == 0:
		return emb.with_rows(rows)

	rng = np.random.default_rng([seed, 1])
	low = rows[:, dims].min(axis=0)
	high = rows[:, dims].max(axis=0)
	rows[:, dims] = rng.uniform(low, high, size=(len(emb), len(dims)))
	return emb.with_rows(rows)
