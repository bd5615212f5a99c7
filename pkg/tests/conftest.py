from pathlib import Path

import pytest

from chatea.kg import Fact, KnowledgeGraph, parse_time, synthetic_pair

FIXTURES = Path(__file__).parent / 'fixtures'

MAIN_ID = 7497
CAND_ID = 23393
RAJ_ID = 23006

MAIN_DESCRIPTION = (
	'The British Monarch is the head of the monarchy of the United Kingdom, currently held by Queen Elizabeth II, '
	'who has reigned since 1952 and has made various visits to countries such as the United States, South Korea, '
	'and Lithuania, among others, while also hosting visits from foreign leaders and dignitaries.'
)
CAND_DESCRIPTION = (
	'The Monarchy of the United Kingdom is the constitutional monarchy that serves as the head of state of the '
	'United Kingdom, with the monarch appointed by the Governor of Hong Kong and holding various roles such as the '
	'Lord Chancellor, Master of the Rolls, and Lord President of the Council.'
)


def _fact(h: int, r: int, t: int, start: str = '~', end: str = '~') -> Fact:
	return Fact(h, r, t, parse_time(start), parse_time(end))


def case_kg1() -> KnowledgeGraph:
	'''
	British Monarch with its five visits. Every counterpart has degree 2, so
	the tuples keep file order.
	'''
	entities = {
		MAIN_ID: 'British Monarch',
		1001: 'Ireland',
		1002: 'Elizabeth II',
		1003: 'United States',
		1004: 'South Korea',
		1005: 'Lithuania',
	}
	relations = {0: 'Host a visit', 1: 'Make a visit', 2: 'Consult'}
	facts = [
		_fact(1001, 0, MAIN_ID, '2011-03', '2011-03'),
		_fact(MAIN_ID, 0, 1002, '2011-05', '2011-05'),
		_fact(MAIN_ID, 1, 1003, '2007-05', '2007-05'),
		_fact(MAIN_ID, 1, 1004, '1999-04', '1999-04'),
		_fact(1002, 1, MAIN_ID, '2011-05', '2011-05'),
		_fact(1001, 2, 1005, '2010-01', '2010-01'),
		_fact(1003, 2, 1005, '2010-02', '2010-02'),
		_fact(1004, 2, 1005, '2010-03', '2010-03'),
	]
	return KnowledgeGraph.build('KG1', entities, relations, facts)


def case_kg2() -> KnowledgeGraph:
	entities = {
		CAND_ID: 'Monarchy_of_the_United_Kingdom',
		23001: 'United_Kingdom',
		23002: 'Governor_of_Hong_Kong',
		23003: 'Constitutional_monarchy',
		23004: 'Chancellor_of_the_Duchy_of_Lancaster',
		23005: 'Deputy_Prime_Minister_of_the_United_Kingdom',
		RAJ_ID: 'British_Raj',
	}
	relations = {0: 'country', 1: 'appointed by', 2: 'instance of'}
	facts = [
		_fact(CAND_ID, 0, 23001),
		_fact(23002, 1, CAND_ID),
		_fact(CAND_ID, 2, 23003),
		_fact(23004, 1, CAND_ID),
		_fact(23005, 1, CAND_ID),
	]
	return KnowledgeGraph.build('KG2', entities, relations, facts)


@pytest.fixture
def case_pair() -> tuple[KnowledgeGraph, KnowledgeGraph]:
	return case_kg1(), case_kg2()


@pytest.fixture(scope='session')
def small_synthetic():
	return synthetic_pair(n_entities=40, seed=3)


@pytest.fixture
def fixture_text():
	from chatea.prompts.templates import read_asset

	def read(name: str) -> str:
		return read_asset(FIXTURES / name)

	return read
