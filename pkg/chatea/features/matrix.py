import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ChatEAError, ReferentialIntegrityError

MAGIC = b'CEAM'
FORMAT_VERSION = 1
_HEADER = struct.Struct('<4sIII')


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
	'''
	One row per entity, rows in ascending entity-id order.
	'''
	ids: tuple[int, ...]
	rows: np.ndarray

	def __post_init__(self):
		rows = np.asarray(self.rows, dtype=np.float64)
		if rows.ndim != 2 or rows.shape[0] != len(self.ids):
			raise ValueError(f'expected a ({len(self.ids)}, dim) matrix, got shape {rows.shape}')
		if not np.all(np.isfinite(rows)):
			raise ValueError('embedding rows must be finite')
		object.__setattr__(self, 'rows', rows)

	@property
	def dim(self) -> int:
		return int(self.rows.shape[1])

	def __len__(self) -> int:
		return len(self.ids)

	def row(self, entity_id: int) -> np.ndarray:
		return self.rows[self.index[entity_id]]

	@property
	def index(self) -> dict[int, int]:
		cached = self.__dict__.get('_index')
		if cached is None:
			cached = {e: i for i, e in enumerate(self.ids)}
			object.__setattr__(self, '_index', cached)
		return cached

	def with_rows(self, rows: np.ndarray) -> 'EmbeddingMatrix':
		return EmbeddingMatrix(self.ids, rows)


def concat(*views: EmbeddingMatrix) -> EmbeddingMatrix:
	if len(views) == 0:
		raise ValueError('nothing to concatenate')
	for view in views[1:]:
		if view.ids != views[0].ids:
			raise ValueError('views do not share entity indexing')
	return EmbeddingMatrix(views[0].ids, np.concatenate([v.rows for v in views], axis=1))


def save_matrix(matrix: EmbeddingMatrix, path: str | Path) -> None:
	'''
	Binary layout: 16-byte header (magic, version, dim, count), `count` int64
	entity ids, then `count * dim` float64 values, all little-endian.
	'''
	with open(path, 'wb') as f:
		f.write(_HEADER.pack(MAGIC, FORMAT_VERSION, matrix.dim, len(matrix)))
		f.write(np.asarray(matrix.ids, dtype='<i8').tobytes())
		f.write(np.ascontiguousarray(matrix.rows, dtype='<f8').tobytes())


def load_matrix(path: str | Path) -> EmbeddingMatrix:
	data = Path(path).read_bytes()
	if len(data) < _HEADER.size:
		raise ChatEAError(f'{path}: truncated header')

	magic, version, dim, count = _HEADER.unpack_from(data)
	if magic != MAGIC:
		raise ChatEAError(f'{path}: not an embedding file (magic {magic!r})')
	if version != FORMAT_VERSION:
		raise ChatEAError(f'{path}: unsupported format version {version}')

	ids_end = _HEADER.size + 8 * count
	expected = ids_end + 8 * count * dim
	if len(data) != expected:
		raise ChatEAError(f'{path}: expected {expected} bytes, found {len(data)}')

	ids = np.frombuffer(data, dtype='<i8', count=count, offset=_HEADER.size)
	rows = np.frombuffer(data, dtype='<f8', count=count * dim, offset=ids_end).reshape(count, dim)
	return EmbeddingMatrix(tuple(int(i) for i in ids), rows.copy())


def load_text_vectors(path: str | Path, entity_ids: tuple[int, ...]) -> EmbeddingMatrix:
	'''
	Reads "id<TAB>v1 v2 ... vD" lines and orders them by `entity_ids`.
	'''
	vectors: dict[int, np.ndarray] = {}
	dim = None
	with open(path, encoding='utf-8') as f:
		for line_no, line in enumerate(f, start=1):
			if line.strip() == '':
				continue
			try:
				_id, values = line.rstrip('\n').split('\t', 1)
				vec = np.array([float(v) for v in values.split()], dtype=np.float64)
				entity_id = int(_id)
			except ValueError as e:
				raise ChatEAError(f'{path}:{line_no}: {e}') from None

			if dim is None:
				dim = len(vec)
			elif len(vec) != dim:
				raise ChatEAError(f'{path}:{line_no}: expected {dim} values, got {len(vec)}')
			vectors[entity_id] = vec

	missing = [e for e in entity_ids if e not in vectors]
	if missing:
		raise ReferentialIntegrityError(f'{path}: no vector for {len(missing)} entities, e.g. {missing[:5]}')

	rows = np.stack([vectors[e] for e in entity_ids]) if entity_ids else np.zeros((0, dim or 0))
	return EmbeddingMatrix(entity_ids, rows)


def load_name_vectors(path: str | Path, entity_ids: tuple[int, ...]) -> EmbeddingMatrix:
	'''
	Accepts either the text layout or the binary layout (detected by magic).
	'''
	with open(path, 'rb') as f:
		head = f.read(4)

	if head == MAGIC:
		matrix = load_matrix(path)
		if set(matrix.ids) != set(entity_ids):
			raise ReferentialIntegrityError(f'{path}: entity ids do not match the KG')
		order = [matrix.index[e] for e in entity_ids]
		return EmbeddingMatrix(entity_ids, matrix.rows[order])

	return load_text_vectors(path, entity_ids)
