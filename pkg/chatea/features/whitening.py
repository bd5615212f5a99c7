from logging import warning as log_warning

import numpy as np
from scipy.linalg import eigh

from ..errors import WhiteningError
from .matrix import EmbeddingMatrix

# eigenvalues below this fraction of the largest one count as zero variance
_RANK_TOL = 1e-10


def whitening_transform(x: np.ndarray, keep_dim: int) -> tuple[np.ndarray, np.ndarray]:
	'''
	Returns (mu, W) such that (x - mu) @ W has identity sample covariance on
	its `keep_dim` columns, the directions of largest variance first.
	'''
	n, d = x.shape
	if keep_dim < 1:
		raise WhiteningError('keep_dim must be at least 1')
	if n < keep_dim:
		raise WhiteningError(f'need at least keep_dim={keep_dim} vectors, got {n}')
	if n < 2:
		raise WhiteningError('whitening needs at least two vectors')

	mu = x.mean(axis=0)
	centered = x - mu
	cov = centered.T @ centered / (n - 1)

	eigvals, eigvecs = eigh(cov)
	order = np.argsort(eigvals)[::-1]
	eigvals, eigvecs = eigvals[order], eigvecs[:, order]

	top = eigvals[0] if len(eigvals) else 0.0
	rank = int(np.sum(eigvals > _RANK_TOL * max(top, 0.0))) if top > 0 else 0

	if rank < d:
		log_warning(f'whitening: covariance has rank {rank} < {d}, dropping {d - rank} zero-variance directions')
	if keep_dim > rank:
		raise WhiteningError(f'keep_dim={keep_dim} exceeds covariance rank {rank}')

	w = eigvecs[:, :keep_dim] / np.sqrt(eigvals[:keep_dim])
	return mu, w


def whiten(name_vectors: EmbeddingMatrix, keep_dim: int) -> EmbeddingMatrix:
	mu, w = whitening_transform(name_vectors.rows, keep_dim)
	return name_vectors.with_rows((name_vectors.rows - mu) @ w)


def whiten_pair(
	left: EmbeddingMatrix,
	right: EmbeddingMatrix,
	keep_dim: int,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
	'''
	Fits one transform on both KGs' name vectors so they stay comparable.
	'''
	mu, w = whitening_transform(np.vstack([left.rows, right.rows]), keep_dim)
	return left.with_rows((left.rows - mu) @ w), right.with_rows((right.rows - mu) @ w)
