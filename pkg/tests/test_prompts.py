import random
from hashlib import sha256

import pytest
from conftest import CAND_DESCRIPTION, CAND_ID, MAIN_DESCRIPTION, MAIN_ID

from chatea.backends.scripted import ScriptedBackend
from chatea.errors import ChatEAError, ReplyParseError
from chatea.prompts import (
	Ablation,
	DescriptionCache,
	PromptCodec,
	ReasoningVariant,
	SimilarityScores,
	build_card,
	generate_description,
	load_template,
	parse_scores,
	parse_verdict,
	render_card,
	render_reasoning_prompt,
	render_rethinking_prompt,
	render_system_prompt,
	template_hashes,
)
from chatea.prompts.templates import TEMPLATE_DIR


def test_templates_match_their_pins():
	for name, digest in template_hashes().items():
		assert sha256((TEMPLATE_DIR / f'{name}.txt').read_bytes()).hexdigest() == digest
		assert load_template(name).sha256 == digest


def test_unknown_template():
	with pytest.raises(ChatEAError):
		load_template('nope')


def test_case_card(case_pair):
	kg1, kg2 = case_pair
	card = build_card(kg1, MAIN_ID, MAIN_DESCRIPTION)

	assert card.id == '7497'
	assert card.tuples[0] == ('Ireland', 'Host a visit', 'British Monarch', '2011-03', '2011-03')
	assert render_card(card).startswith("Entity('British Monarch', '7497', 'The British Monarch is")
	assert render_card(build_card(kg2, CAND_ID)).endswith(
		'(Deputy_Prime_Minister_of_the_United_Kingdom, appointed by, Monarchy_of_the_United_Kingdom, ~, ~)])'
	)


def test_card_quotes_are_escaped(case_pair):
	kg1, _ = case_pair
	card = build_card(kg1, MAIN_ID, "the Queen's office")
	assert "'the Queen\\'s office'" in render_card(card)


@pytest.mark.parametrize(('ablation', 'check'), [
	(Ablation.NO_NAME, lambda c: c.name == '' and c.tuples[0][2] == ''),
	(Ablation.NO_STRUCTURE, lambda c: c.tuples == ()),
	(Ablation.NO_TEMPORAL, lambda c: all(t[3:] == ('~', '~') for t in c.tuples)),
	(Ablation.NO_DESCRIPTION, lambda c: c.description == ''),
])
def test_card_ablations(case_pair, ablation, check):
	kg1, _ = case_pair
	assert check(build_card(kg1, MAIN_ID, MAIN_DESCRIPTION, ablations=frozenset({ablation})))


def test_plain_card(case_pair):
	kg1, _ = case_pair
	card = build_card(kg1, MAIN_ID, 'd', cap=1)
	assert render_card(card, code=False) == (
		'Name: British Monarch, ID: 7497, Description: d, '
		'Tuples: [(Ireland, Host a visit, British Monarch, 2011-03, 2011-03)]'
	)


def test_case_reasoning_prompt(case_pair, fixture_text):
	kg1, kg2 = case_pair
	main = build_card(kg1, MAIN_ID, MAIN_DESCRIPTION)
	cand = build_card(kg2, CAND_ID, CAND_DESCRIPTION)
	prompt = render_reasoning_prompt(main, cand, ReasoningVariant.TRANSCRIPT)
	assert prompt == fixture_text('case_reasoning_prompt.txt')


def test_case_system_prompt(fixture_text):
	assert render_system_prompt() == fixture_text('case_system_prompt.txt')
	assert PromptCodec().system_prompt == fixture_text('case_system_prompt.txt')
	with pytest.raises(ValueError):
		render_system_prompt('  ')


def test_case_rethinking_prompt(fixture_text):
	prompt = render_rethinking_prompt(
		'British Monarch',
		[('Monarchy_of_the_United_Kingdom', 5.0), ('British_Raj', 2.5)],
	)
	assert prompt == fixture_text('case_rethinking_prompt.txt')


def test_rethinking_prompt_validation():
	with pytest.raises(ValueError):
		render_rethinking_prompt('x', [])
	with pytest.raises(ValueError):
		render_rethinking_prompt('x', [('a', 2.0), ('b', 3.0)])


def test_no_code_codec_uses_plain_prompts(case_pair):
	kg1, kg2 = case_pair
	codec = PromptCodec(ablations=frozenset({Ablation.NO_CODE}))
	assert not codec.code
	assert codec.system_prompt == render_system_prompt(code=False)
	prompt = codec.reasoning(codec.card(kg1, MAIN_ID), codec.card(kg2, CAND_ID))
	assert 'Name: British Monarch' in prompt
	assert "Entity('" not in prompt


def test_codec_few_shot_files(tmp_path):
	(tmp_path / 'case.txt').write_text('my own reasoning case\n', encoding='utf-8')
	(tmp_path / 'examples.txt').write_text('[EXAMPLE 1] custom\n', encoding='utf-8')
	codec = PromptCodec(
		reasoning_case_path=str(tmp_path / 'case.txt'),
		rethinking_examples_path=str(tmp_path / 'examples.txt'),
	)
	assert 'my own reasoning case' in codec.system_prompt
	assert '[EXAMPLE 1] custom' in codec.rethinking('x', [('a', 1.0)])


def test_parse_case_replies(fixture_text):
	perfect = parse_scores(fixture_text('reply_perfect.txt'))
	assert perfect.values == (5, 5, 5, 5)
	assert perfect.aggregate == 5.0

	mismatch = parse_scores(fixture_text('reply_mismatch.txt'))
	assert mismatch.values == (4, 3, 4, 2)
	assert mismatch.aggregate == 3.25

	with pytest.raises(ReplyParseError):
		parse_scores(fixture_text('reply_format_error.txt'))


def test_parse_scores_is_lenient_about_case_and_spacing():
	reply = (
		'[name similarity]=2 out of 5, [NAME SIMILARITY] = 4 out of 5\n'
		'[ PROBABILITY OF DESCRIPTION  POINTING SAME ENTITY ] = 3  out  of 5\n'
		'[STRUCTURE SIMILARITY] = 1 out of 5 [TIME SIMILARITY] = 5 out of 5'
	)
	assert parse_scores(reply).values == (4, 3, 1, 5)


@pytest.mark.parametrize('reply', [
	'[NAME SIMILARITY] = 4 out of 5',
	'[NAME SIMILARITY] = 6 out of 5, [PROBABILITY OF DESCRIPTION POINTING SAME ENTITY] = 3 out of 5, '
	'[STRUCTURE SIMILARITY] = 1 out of 5, [TIME SIMILARITY] = 5 out of 5',
	'[NAME SIMILARITY] = 0 out of 5, [PROBABILITY OF DESCRIPTION POINTING SAME ENTITY] = 3 out of 5, '
	'[STRUCTURE SIMILARITY] = 1 out of 5, [TIME SIMILARITY] = 5 out of 5',
])
def test_parse_scores_rejects(reply):
	with pytest.raises(ReplyParseError) as info:
		parse_scores(reply)
	assert info.value.raw == reply


_FRAGMENTS = (
	'[NAME SIMILARITY]', '[PROBABILITY OF DESCRIPTION POINTING SAME ENTITY]', '[STRUCTURE SIMILARITY]',
	'[TIME SIMILARITY]', ' = ', '=', ' out of 5', 'out of', '0', '3', '5', '7', '99999999999', '-2',
	'[', ']', '\n', ' ', ',', '\u00e9', '\u2014', '\x00', '[YES]', 'name similarity',
)


def test_parse_scores_returns_scores_or_a_parse_error():
	rng = random.Random(0)
	for _ in range(2000):
		reply = ''.join(rng.choice(_FRAGMENTS) for _ in range(rng.randint(0, 40)))
		try:
			scores = parse_scores(reply)
		except ReplyParseError as e:
			assert e.raw == reply
			continue
		assert all(1 <= v <= 5 for v in scores.values)

	for _ in range(200):
		values = [rng.randint(1, 5) for _ in range(4)]
		noise = ''.join(rng.choice(_FRAGMENTS[9:]) for _ in range(rng.randint(0, 10)))
		assert parse_scores(noise + SimilarityScores(*values).canonical_line()).values == tuple(values)


def test_weighted_aggregate_and_canonical_line():
	scores = SimilarityScores(5, 1, 3, 3, weights=(2.0, 0.0, 1.0, 1.0))
	assert scores.aggregate == 4.0
	assert parse_scores(scores.canonical_line()).values == scores.values
	assert SimilarityScores.floor().values == (1, 1, 1, 1)
	with pytest.raises(ValueError):
		SimilarityScores(0, 1, 1, 1)
	with pytest.raises(ValueError):
		SimilarityScores(1, 1, 1, 1, weights=(0.0, 0.0, 0.0, 0.0))


@pytest.mark.parametrize(('reply', 'strict', 'satisfied'), [
	('[YES]', True, True),
	('[no]', True, False),
	('I first thought [NO], but on reflection [YES]', True, True),
	('[YES] ... actually [NO]', False, False),
	('YES', False, True),
	('Both candidates look alike.\nNO.', False, False),
	('Answer: yes', False, True),
	('**YES**', False, True),
])
def test_parse_verdict(reply, strict, satisfied):
	assert parse_verdict(reply, strict).satisfied is satisfied


@pytest.mark.parametrize('reply', ['YES', 'maybe'])
def test_strict_verdict_needs_brackets(reply):
	with pytest.raises(ReplyParseError):
		parse_verdict(reply, strict=True)


@pytest.mark.parametrize('reply', [
	'No doubt the first candidate fits best.',
	'Yes, the names differ, so I cannot decide.',
	'The answer is NO.',
])
def test_lenient_verdict_ignores_yes_and_no_in_prose(reply):
	with pytest.raises(ReplyParseError):
		parse_verdict(reply)


def test_description_generation_is_cached(tmp_path, case_pair):
	kg1, _ = case_pair
	codec = PromptCodec()
	backend = ScriptedBackend('m', replies=['A  head\nof state.'])
	cache = DescriptionCache(tmp_path / 'descriptions.csv')

	assert generate_description(backend, kg1, MAIN_ID, cache, codec, target=MAIN_ID) == 'A head of state.'
	assert generate_description(backend, kg1, MAIN_ID, cache, codec) == 'A head of state.'
	assert backend.ledger.for_target(MAIN_ID).calls == 1

	reloaded = DescriptionCache(tmp_path / 'descriptions.csv')
	assert reloaded.get(('KG1', MAIN_ID, 'm')) == 'A head of state.'
	assert reloaded.get(('KG1', MAIN_ID, 'other-model')) is None


def test_fresh_description_cache_drops_earlier_runs(tmp_path, case_pair):
	kg1, _ = case_pair
	path = tmp_path / 'descriptions.csv'
	DescriptionCache(path).put(('KG1', MAIN_ID, 'm'), 'from an earlier run')

	cache = DescriptionCache.fresh(path)
	assert len(cache) == 0
	backend = ScriptedBackend('m', replies=['A head of state.'])
	assert generate_description(backend, kg1, MAIN_ID, cache, PromptCodec()) == 'A head of state.'
	assert backend.ledger.for_target(None).calls == 1
	assert len(DescriptionCache(path)) == 1
	assert len(DescriptionCache.fresh(tmp_path / 'missing.csv')) == 0


def test_failed_description_is_empty_and_not_cached(case_pair):
	kg1, _ = case_pair
	backend = ScriptedBackend('m', replies=[])
	cache = DescriptionCache()

	assert generate_description(backend, kg1, MAIN_ID, cache, PromptCodec()) == ''
	assert len(cache) == 0


def test_describe_prompt_has_name_and_tuples(case_pair):
	kg1, _ = case_pair
	prompt = PromptCodec(cap=2).describe(kg1, MAIN_ID)
	assert 'British Monarch' in prompt
	assert '(Ireland, Host a visit, British Monarch, 2011-03, 2011-03)' in prompt
	assert 'United States' not in prompt
