import os
import random
from logging import info as log_info
from pathlib import Path

from ..errors import AnchorError, KGParseError
from .model import UNKNOWN, AnchorSet, EntityId, Fact, KnowledgeGraph, fractional_year, parse_time


def _read_lines(path: str | Path):
	with open(path, encoding='utf-8') as f:
		for line_no, raw in enumerate(f, start=1):
			line = raw.rstrip('\n').rstrip('\r')
			if line.strip() == '':
				continue
			yield line_no, line


def _parse_id(path: str | Path, line_no: int, text: str) -> int:
	try:
		value = int(text.strip())
	except ValueError:
		raise KGParseError(str(path), line_no, f'expected an integer id, got {text!r}') from None

	if value < 0:
		raise KGParseError(str(path), line_no, f'negative id {value}')
	return value


def load_id_names(path: str | Path) -> dict[int, str]:
	'''
	Reads an "id<TAB>name" file (ent_ids_N / rel_ids_N).
	'''
	table: dict[int, str] = {}
	for line_no, line in _read_lines(path):
		parts = line.split('\t')
		if len(parts) != 2:
			raise KGParseError(str(path), line_no, f'expected "id<TAB>name", got {len(parts)} fields')

		_id = _parse_id(path, line_no, parts[0])
		if _id in table:
			raise KGParseError(str(path), line_no, f'duplicate id {_id}')
		table[_id] = parts[1]
	return table


def _parse_fact(path: str | Path, line_no: int, line: str, temporal: bool) -> Fact:
	parts = line.split('\t')
	expected = 5 if temporal else 3
	if len(parts) != expected:
		raise KGParseError(str(path), line_no, f'expected {expected} tab-separated fields, got {len(parts)}')

	head, rel, tail = (_parse_id(path, line_no, p) for p in parts[:3])
	if not temporal:
		return Fact(head, rel, tail)

	try:
		start, end = parse_time(parts[3]), parse_time(parts[4])
	except ValueError as e:
		raise KGParseError(str(path), line_no, str(e)) from None

	if start is not UNKNOWN and end is not UNKNOWN \
		and (fractional_year(start) or 0.0) > (fractional_year(end) or 0.0):
		raise KGParseError(str(path), line_no, f'start time {start} is after end time {end}')

	return Fact(head, rel, tail, start, end)


def load_kg(
	triple_path: str | Path,
	entity_names_path: str | Path,
	temporal: bool = False,
	relation_names_path: str | Path | None = None,
	name: str | None = None,
) -> KnowledgeGraph:
	'''
	Loads one side of a benchmark pair.

	Args
	----
	triple_path: str | Path
		`triples_N`, "h<TAB>r<TAB>t" or "h<TAB>r<TAB>t<TAB>ts<TAB>te" when temporal
	entity_names_path: str | Path
		`ent_ids_N`, "id<TAB>name"
	temporal: bool
		Expect the five-field layout ("~" marks an unknown time)
	relation_names_path: str | Path | None
		`rel_ids_N`; relation ids are their own names when the file is absent

	Returns
	-------
	KnowledgeGraph
	'''
	facts = [_parse_fact(triple_path, line_no, line, temporal) for line_no, line in _read_lines(triple_path)]
	entities = load_id_names(entity_names_path)

	if relation_names_path is not None and os.path.exists(relation_names_path):
		relations = load_id_names(relation_names_path)
	else:
		relations = {r: str(r) for r in sorted({f.relation for f in facts})}

	kg = KnowledgeGraph.build(
		name=name or Path(triple_path).name,
		entities=entities,
		relations=relations,
		facts=facts,
		temporal=temporal,
	)
	log_info(f'loaded {kg.name}: {len(kg.entities)} entities, {len(kg.relations)} relations, {len(kg.facts)} facts')
	return kg


def serialize_kg(kg: KnowledgeGraph, directory: str | Path, suffix: str = '1') -> dict[str, Path]:
	'''
	Writes `triples_N`, `ent_ids_N` and `rel_ids_N` in the format `load_kg` reads.
	'''
	directory = Path(directory)
	directory.mkdir(parents=True, exist_ok=True)

	paths = {
		'triples': directory / f'triples_{suffix}',
		'entities': directory / f'ent_ids_{suffix}',
		'relations': directory / f'rel_ids_{suffix}',
	}

	with open(paths['triples'], 'w', encoding='utf-8', newline='\n') as f:
		for fact in kg.facts:
			fields = [str(fact.head), str(fact.relation), str(fact.tail)]
			if kg.temporal:
				fields += [str(fact.start_time), str(fact.end_time)]
			f.write('\t'.join(fields) + '\n')

	for key, table in (('entities', kg.entities), ('relations', kg.relations)):
		with open(paths[key], 'w', encoding='utf-8', newline='\n') as f:
			for _id, label in table.items():
				f.write(f'{_id}\t{label}\n')

	return paths


def split_anchors(
	pairs: list[tuple[EntityId, EntityId]],
	split_seed: int = 0,
	train_ratio: float = 0.3,
) -> AnchorSet:
	if not 0 < train_ratio < 1:
		raise AnchorError(f'train ratio must be in (0, 1), got {train_ratio}')

	seen_left: set[EntityId] = set()
	seen_right: set[EntityId] = set()
	for left, right in pairs:
		if left in seen_left:
			raise AnchorError(f'entity {left} appears twice on the left side')
		if right in seen_right:
			raise AnchorError(f'entity {right} appears twice on the right side')
		seen_left.add(left)
		seen_right.add(right)

	shuffled = list(pairs)
	random.Random(split_seed).shuffle(shuffled)
	n_train = int(train_ratio * len(shuffled))

	return AnchorSet(
		pairs=tuple(pairs),
		train=tuple(shuffled[:n_train]),
		test=tuple(shuffled[n_train:]),
	)


def read_anchor_pairs(path: str | Path) -> list[tuple[EntityId, EntityId]]:
	'''
	"id1<TAB>id2" lines, in file order.
	'''
	pairs = []
	for line_no, line in _read_lines(path):
		parts = line.split('\t')
		if len(parts) != 2:
			raise KGParseError(str(path), line_no, f'expected "id1<TAB>id2", got {len(parts)} fields')
		pairs.append((_parse_id(path, line_no, parts[0]), _parse_id(path, line_no, parts[1])))
	return pairs


def load_anchors(path: str | Path, split_seed: int = 0, train_ratio: float = 0.3) -> AnchorSet:
	'''
	Reads `ref_ent_ids` and splits it deterministically.
	'''
	return split_anchors(read_anchor_pairs(path), split_seed, train_ratio)


def write_anchors(pairs: list[tuple[EntityId, EntityId]] | tuple, path: str | Path) -> None:
	with open(path, 'w', encoding='utf-8', newline='\n') as f:
		for left, right in pairs:
			f.write(f'{left}\t{right}\n')
