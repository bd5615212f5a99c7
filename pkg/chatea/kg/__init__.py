from .loader import (
	load_anchors,
	load_id_names,
	load_kg,
	read_anchor_pairs,
	serialize_kg,
	split_anchors,
	write_anchors,
)
from .model import (
	UNKNOWN,
	AnchorSet,
	EntityId,
	Fact,
	KnowledgeGraph,
	RelationId,
	TimePoint,
	entity_tuples,
	fractional_year,
	neighbors,
	parse_time,
	relations_of,
	time_info,
)
from .synthetic import synthetic_pair

__all__ = [
	'UNKNOWN',
	'AnchorSet',
	'EntityId',
	'Fact',
	'KnowledgeGraph',
	'RelationId',
	'TimePoint',
	'entity_tuples',
	'fractional_year',
	'load_anchors',
	'load_id_names',
	'load_kg',
	'neighbors',
	'parse_time',
	'read_anchor_pairs',
	'relations_of',
	'serialize_kg',
	'split_anchors',
	'synthetic_pair',
	'time_info',
	'write_anchors',
]
