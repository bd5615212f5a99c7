'''
Seeded generator of an isomorphic KG pair with perturbed surface names,
used for desk-scale runs where the gold alignment is known by construction.
'''
import numpy as np

from .loader import split_anchors
from .model import UNKNOWN, AnchorSet, Fact, KnowledgeGraph

_SYLLABLES = (
	'ka', 'lo', 'mi', 're', 'su', 'ta', 'vo', 'ne', 'di', 'ra', 'po', 'ze', 'gu', 'fi', 'ba', 'xe',
	'lun', 'mar', 'tos', 'vel', 'dra', 'kin', 'sor', 'bel', 'quo', 'nir', 'hal', 'wen',
)
_RELATIONS = ('Host a visit', 'Make a visit', 'Consult', 'Sign agreement', 'Express intent to cooperate', 'Accuse')
_KG2_RELATIONS = ('hosted', 'visited', 'consulted', 'signed', 'cooperates with', 'accused')
_ALPHABET = 'abcdefghijklmnopqrstuvwxyz'

KG2_ID_OFFSET = 10_000


def _make_name(rng: np.random.Generator) -> str:
	words = []
	for _ in range(int(rng.integers(2, 4))):
		n_syl = int(rng.integers(2, 4))
		word = ''.join(_SYLLABLES[int(i)] for i in rng.integers(0, len(_SYLLABLES), n_syl))
		words.append(word.capitalize())
	return ' '.join(words)


def perturb_name(name: str, rng: np.random.Generator, noise: float) -> str:
	'''
	Wiki-style rendering of `name` (underscores) with, per word and with
	probability `noise`, one character substituted.
	'''
	words = name.split(' ')
	for i, word in enumerate(words):
		if len(word) > 3 and rng.random() < noise:
			pos = int(rng.integers(1, len(word)))
			chars = list(word)
			chars[pos] = _ALPHABET[int(rng.integers(0, len(_ALPHABET)))]
			words[i] = ''.join(chars)
	return '_'.join(words)


def _random_time(rng: np.random.Generator) -> tuple[str, str]:
	year = int(rng.integers(1995, 2021))
	month = int(rng.integers(1, 13))
	stamp = f'{year:04d}-{month:02d}'
	return stamp, stamp


def synthetic_pair(
	n_entities: int = 100,
	seed: int = 0,
	name_noise: float = 0.3,
	temporal: bool = True,
	facts_per_entity: int = 3,
	train_ratio: float = 0.3,
	split_seed: int | None = None,
) -> tuple[KnowledgeGraph, KnowledgeGraph, AnchorSet]:
	'''
	Returns (KG1, KG2, anchors). KG2 is KG1 with entity ids permuted and
	shifted by KG2_ID_OFFSET, relation names restyled and entity names perturbed.
	The anchors are split with `split_seed`, which defaults to `seed`.
	'''
	rng = np.random.default_rng(seed)

	names: list[str] = []
	used: set[str] = set()
	while len(names) < n_entities:
		candidate = _make_name(rng)
		if candidate not in used:
			used.add(candidate)
			names.append(candidate)

	facts1: list[Fact] = []
	seen_edges: set[tuple[int, int, int]] = set()
	for head in range(n_entities):
		for _ in range(facts_per_entity):
			tail = int(rng.integers(0, n_entities))
			if tail == head:
				continue
			rel = int(rng.integers(0, len(_RELATIONS)))
			if (head, rel, tail) in seen_edges:
				continue
			seen_edges.add((head, rel, tail))
			start, end = _random_time(rng) if temporal else (UNKNOWN, UNKNOWN)
			facts1.append(Fact(head, rel, tail, start, end))

	perm = rng.permutation(n_entities)
	mapping = {e: KG2_ID_OFFSET + int(perm[e]) for e in range(n_entities)}

	kg1 = KnowledgeGraph.build(
		name='synthetic_1',
		entities={e: names[e] for e in range(n_entities)},
		relations=dict(enumerate(_RELATIONS)),
		facts=facts1,
		temporal=temporal,
	)

	facts2 = [Fact(mapping[f.head], f.relation, mapping[f.tail], f.start_time, f.end_time) for f in facts1]
	facts2 = [facts2[int(i)] for i in rng.permutation(len(facts2))]
	kg2 = KnowledgeGraph.build(
		name='synthetic_2',
		entities={mapping[e]: perturb_name(names[e], rng, name_noise) for e in range(n_entities)},
		relations=dict(enumerate(_KG2_RELATIONS)),
		facts=facts2,
		temporal=temporal,
	)

	pairs = [(e, mapping[e]) for e in range(n_entities)]
	return kg1, kg2, split_anchors(pairs, seed if split_seed is None else split_seed, train_ratio)
