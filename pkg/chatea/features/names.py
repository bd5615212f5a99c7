'''
Bundled character n-gram hashing encoder for entity names. It stands in for
an external pretrained text encoder so every stage runs offline.
'''
from hashlib import blake2b

import numpy as np

from .matrix import EmbeddingMatrix


def normalize_name(name: str) -> str:
	return ' '.join(name.replace('_', ' ').lower().split())


def _ngrams(text: str, n_min: int, n_max: int):
	padded = f' {text} '
	for n in range(n_min, n_max + 1):
		for i in range(len(padded) - n + 1):
			yield padded[i:i + n]


def encode_name(name: str, dim: int = 64, n_min: int = 2, n_max: int = 4) -> np.ndarray:
	vec = np.zeros(dim, dtype=np.float64)
	for gram in _ngrams(normalize_name(name), n_min, n_max):
		digest = blake2b(gram.encode('utf-8'), digest_size=8).digest()
		value = int.from_bytes(digest, 'little')
		sign = 1.0 if (value >> 63) & 1 else -1.0
		vec[value % dim] += sign

	norm = np.linalg.norm(vec)
	return vec / norm if norm > 0 else vec


def hashing_name_encoder(names: dict[int, str], dim: int = 64) -> EmbeddingMatrix:
	'''
	Deterministic, L2-normalised name vectors in ascending entity-id order.
	'''
	ids = tuple(sorted(names))
	rows = np.stack([encode_name(names[e], dim) for e in ids]) if ids else np.zeros((0, dim))
	return EmbeddingMatrix(ids, rows)
