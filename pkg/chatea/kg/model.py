import re
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from ..errors import ReferentialIntegrityError

EntityId = int
RelationId = int


class UnknownTime(Enum):
	UNKNOWN = '~'

	def __str__(self) -> str:
		return self.value


UNKNOWN = UnknownTime.UNKNOWN

# known stamps keep their original text ('2011-03'), the unknown stamp is UNKNOWN
TimePoint = str | UnknownTime

_TIME_RE = re.compile(r'^(-?\d{1,4})(?:-(\d{1,2}))?(?:-(\d{1,2}))?$')


def parse_time(text: str) -> TimePoint:
	'''
	Parses a timestamp field of a temporal triple file.
	"~" (or an empty field) is the unknown stamp.

	Raises ValueError on anything that is not YYYY, YYYY-MM or YYYY-MM-DD.
	'''
	text = text.strip()
	if text in ('', '~'):
		return UNKNOWN

	if _TIME_RE.match(text) is None:
		raise ValueError(f'invalid timestamp {text!r}')

	return text


def fractional_year(point: TimePoint) -> float | None:
	'''
	"YYYY-MM" -> year + (month - 1) / 12, days add (day - 1) / 372.
	Returns None for the unknown stamp.
	'''
	if point is UNKNOWN:
		return None

	match = _TIME_RE.match(str(point))
	if match is None:
		raise ValueError(f'invalid timestamp {point!r}')

	year, month, day = match.groups()
	value = float(year)
	if month is not None:
		value += (int(month) - 1) / 12
	if day is not None:
		value += (int(day) - 1) / 372
	return value


class Fact(NamedTuple):
	head: EntityId
	relation: RelationId
	tail: EntityId
	start_time: TimePoint = UNKNOWN
	end_time: TimePoint = UNKNOWN

	@property
	def is_self_loop(self) -> bool:
		return self.head == self.tail

	@property
	def has_known_time(self) -> bool:
		return self.start_time is not UNKNOWN or self.end_time is not UNKNOWN


@dataclass(frozen=True)
class KnowledgeGraph:
	'''
	Immutable after construction; `adjacency` maps every entity to the indexes
	of its incident facts (a self-loop is listed once).
	'''
	name: str
	entities: dict[EntityId, str]
	relations: dict[RelationId, str]
	facts: tuple[Fact, ...]
	adjacency: dict[EntityId, tuple[int, ...]] = field(repr=False)
	temporal: bool
	entity_ids: tuple[EntityId, ...] = field(repr=False)

	@classmethod
	def build(
		cls,
		name: str,
		entities: dict[EntityId, str],
		relations: dict[RelationId, str],
		facts: list[Fact] | tuple[Fact, ...],
		temporal: bool | None = None,
	) -> 'KnowledgeGraph':
		'''
		Args
		----
		temporal: bool, optional
			Whether facts carry a (start, end) pair, even when every time is
			unknown; by default any known time makes the KG temporal
		'''
		adjacency: dict[EntityId, list[int]] = {e: [] for e in entities}
		for idx, fact in enumerate(facts):
			for e in (fact.head, fact.tail):
				if e not in entities:
					raise ReferentialIntegrityError(f'{name}: fact {idx} references unknown entity {e}')
			if fact.relation not in relations:
				raise ReferentialIntegrityError(f'{name}: fact {idx} references unknown relation {fact.relation}')

			adjacency[fact.head].append(idx)
			if not fact.is_self_loop:
				adjacency[fact.tail].append(idx)

		return cls(
			name=name,
			entities=dict(sorted(entities.items())),
			relations=dict(sorted(relations.items())),
			facts=tuple(facts),
			adjacency={e: tuple(v) for e, v in adjacency.items()},
			temporal=any(f.has_known_time for f in facts) if temporal is None else temporal,
			entity_ids=tuple(sorted(entities)),
		)

	def __len__(self) -> int:
		return len(self.entities)

	def index_of(self, e: EntityId) -> int:
		'''
		Row of `e` in every entity-indexed matrix of this KG.
		'''
		return self._row_index[self._check(e)]

	@property
	def _row_index(self) -> dict[EntityId, int]:
		cached = self.__dict__.get('_rows')
		if cached is None:
			cached = {e: i for i, e in enumerate(self.entity_ids)}
			object.__setattr__(self, '_rows', cached)
		return cached

	def degree(self, e: EntityId) -> int:
		return len(self.adjacency[self._check(e)])

	def incident(self, e: EntityId) -> list[Fact]:
		return [self.facts[i] for i in self.adjacency[self._check(e)]]

	def _check(self, e: EntityId) -> EntityId:
		if e not in self.entities:
			raise ReferentialIntegrityError(f'{self.name}: unknown entity {e}')
		return e


@dataclass(frozen=True)
class AnchorSet:
	pairs: tuple[tuple[EntityId, EntityId], ...]
	train: tuple[tuple[EntityId, EntityId], ...]
	test: tuple[tuple[EntityId, EntityId], ...]

	def gold(self) -> dict[EntityId, EntityId]:
		return dict(self.pairs)


# accessors mirroring the member functions of a code-styled entity card

def neighbors(kg: KnowledgeGraph, e: EntityId) -> list[EntityId]:
	result: set[EntityId] = set()
	for fact in kg.incident(e):
		if fact.head == e:
			result.add(fact.tail)
		else:
			result.add(fact.head)
	return sorted(result)


def relations_of(kg: KnowledgeGraph, e: EntityId) -> list[str]:
	return [kg.relations[fact.relation] for fact in kg.incident(e)]


def time_info(kg: KnowledgeGraph, e: EntityId) -> list[tuple[str, str]]:
	return [(str(fact.start_time), str(fact.end_time)) for fact in kg.incident(e)]


def entity_tuples(kg: KnowledgeGraph, e: EntityId, cap: int = 5) -> list[Fact]:
	'''
	At most `cap` incident facts, the ones whose counterpart entity has the
	highest degree first; ties keep fact-file order.
	'''
	if cap < 1:
		raise ValueError('tuple cap must be at least 1')

	def counterpart(fact: Fact) -> EntityId:
		return fact.tail if fact.head == e else fact.head

	ranked = sorted(
		kg.adjacency[kg._check(e)],
		key=lambda idx: (-kg.degree(counterpart(kg.facts[idx])), idx),
	)
	return [kg.facts[idx] for idx in ranked[:cap]]
