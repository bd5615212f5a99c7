from dataclasses import dataclass

import numpy as np

from ..kg import UNKNOWN, KnowledgeGraph, TimePoint, fractional_year
from .matrix import EmbeddingMatrix


@dataclass(frozen=True, eq=False)
class Time2VecParams:
	omega: np.ndarray
	phi: np.ndarray

	def __post_init__(self):
		omega = np.asarray(self.omega, dtype=np.float64).reshape(-1)
		phi = np.asarray(self.phi, dtype=np.float64).reshape(-1)
		if omega.shape != phi.shape or omega.size == 0:
			raise ValueError('omega and phi must be non-empty vectors of equal length')
		object.__setattr__(self, 'omega', omega)
		object.__setattr__(self, 'phi', phi)

	@property
	def dim(self) -> int:
		return int(self.omega.size)

	@classmethod
	def init(cls, dim: int, seed: int = 0, min_period: float = 0.25, max_period: float = 50.0) -> 'Time2VecParams':
		'''
		Linear slope 1/100 per year; periodic frequencies spread geometrically
		between `min_period` and `max_period` years, seeded phases.
		'''
		rng = np.random.default_rng(seed)
		omega = np.empty(dim)
		omega[0] = 0.01
		if dim > 1:
			omega[1:] = 2 * np.pi / np.geomspace(min_period, max_period, dim - 1)
		phi = rng.uniform(0.0, 2 * np.pi, dim)
		phi[0] = 0.0
		return cls(omega, phi)


def time2vec(timestamp: float | None, params: Time2VecParams) -> np.ndarray:
	'''
	Component 0 is linear, the others are sin(omega_i * tau + phi_i).
	`None` (unknown time) gives the zero vector.
	'''
	if timestamp is None:
		return np.zeros(params.dim)

	out = np.sin(params.omega * timestamp + params.phi)
	out[0] = params.omega[0] * timestamp + params.phi[0]
	return out


def entity_time_scalars(kg: KnowledgeGraph, e: int) -> tuple[TimePoint, TimePoint]:
	'''
	Earliest known start and latest known end over the entity's facts.
	'''
	starts = [(fractional_year(f.start_time), f.start_time) for f in kg.incident(e) if f.start_time is not UNKNOWN]
	ends = [(fractional_year(f.end_time), f.end_time) for f in kg.incident(e) if f.end_time is not UNKNOWN]
	start = min(starts, key=lambda p: p[0])[1] if starts else UNKNOWN
	end = max(ends, key=lambda p: p[0])[1] if ends else UNKNOWN
	return start, end


def time_view(kg: KnowledgeGraph, params: Time2VecParams, epoch: float = 2000.0) -> EmbeddingMatrix:
	'''
	Per entity: time2vec(start) followed by time2vec(end), with times measured
	in years since `epoch`.
	'''
	rows = []
	for e in kg.entity_ids:
		halves = []
		for point in entity_time_scalars(kg, e):
			year = fractional_year(point)
			halves.append(time2vec(None if year is None else year - epoch, params))
		rows.append(np.concatenate(halves))

	matrix = np.vstack(rows) if rows else np.zeros((0, 2 * params.dim))
	return EmbeddingMatrix(kg.entity_ids, matrix)
