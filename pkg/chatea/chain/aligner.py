'''
The two-stage loop: collect CSLS candidates within a growing scope, let the
chat model score every new candidate, then ask whether the best one is good
enough to stop.
'''
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from logging import error as log_error
from logging import info as log_info
from logging import warning as log_warning
from typing import Literal, Protocol

from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm

from ..backends import BaseChatBackend, ChatMessage, Usage
from ..errors import BackendError, ReplyParseError
from ..kg import KnowledgeGraph
from ..prompts import (
	DescriptionCache,
	EntityCard,
	PromptCodec,
	RethinkVerdict,
	SimilarityScores,
	generate_description,
	load_template,
	parse_scores,
	parse_verdict,
)
from ..prompts.parsing import DEFAULT_WEIGHTS


class AlignConfig(BaseModel):
	model_config = ConfigDict(extra='forbid', frozen=True)

	schedule: tuple[int, ...] = (1, 10, 20)
	rethink: Literal['llm', 'rule'] = 'llm'
	threshold: float = 4.0
	min_gap: float = Field(1.0, ge=0)
	# False judges max(schedule) candidates in a single round
	two_stage: bool = True
	workers: int = Field(1, ge=1)
	retry_on_parse_error: bool = True
	# length of the stored final ranking
	ranking_depth: int = Field(50, ge=1)

	@field_validator('schedule')
	@classmethod
	def strictly_increasing(cls, value: tuple[int, ...]):
		if len(value) == 0:
			raise ValueError('the scope schedule needs at least one round')
		if value[0] < 1 or any(b <= a for a, b in zip(value, value[1:], strict=False)):
			raise ValueError(f'scope schedule must be strictly increasing and >= 1, got {value}')
		return value

	@property
	def rounds(self) -> tuple[int, ...]:
		return self.schedule if self.two_stage else (max(self.schedule),)


class CandidateSource(Protocol):
	def ranking(self, query: int) -> list[int]:
		'''
		Every target entity, best first.
		'''
		...


@dataclass(frozen=True)
class Judgement:
	candidate: int
	scores: SimilarityScores
	round: int
	# the reply never parsed and the floor scores were used
	parse_failed: bool = False

	@property
	def aggregate(self) -> float:
		return self.scores.aggregate


@dataclass
class AlignmentResult:
	target: int
	judged: list[Judgement] = field(default_factory=list)
	final_ranking: list[int] = field(default_factory=list)
	chosen: int | None = None
	rounds_used: int = 0
	usage: Usage = field(default_factory=Usage)
	failed: bool = False
	error: str | None = None

	def to_record(self) -> dict:
		return {
			'target': self.target,
			'chosen': self.chosen,
			'rounds_used': self.rounds_used,
			'failed': self.failed,
			'error': self.error,
			'judged': [
				{
					'candidate': j.candidate,
					'scores': list(j.scores.values),
					'weights': list(j.scores.weights),
					'aggregate': j.aggregate,
					'round': j.round,
					'parse_failed': j.parse_failed,
				}
				for j in self.judged
			],
			'final_ranking': self.final_ranking,
			'usage': self.usage.to_dict(),
		}


@dataclass
class AlignmentContext:
	kg1: KnowledgeGraph
	kg2: KnowledgeGraph
	candidates: CandidateSource
	backend: BaseChatBackend
	codec: PromptCodec
	cfg: AlignConfig = field(default_factory=AlignConfig)
	descriptions: DescriptionCache | None = None
	weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS
	strict_verdict: bool = False


def final_ranking(judged: dict[int, float], csls_list: list[int]) -> list[int]:
	'''
	Judged candidates by aggregate (highest first, CSLS order on ties), then
	every other candidate in CSLS order.
	'''
	position = {c: i for i, c in enumerate(csls_list)}
	missing = [c for c in judged if c not in position]
	if missing:
		raise ValueError(f'judged candidates {missing} are not in the candidate list')

	head = sorted(judged, key=lambda c: (-judged[c], position[c]))
	return head + [c for c in csls_list if c not in judged]


def rethink_rule(judged: list[float], threshold: float, min_gap: float) -> RethinkVerdict:
	'''
	Satisfied iff the best aggregate reaches `threshold` and leads the
	runner-up by at least `min_gap` (or stands alone).
	'''
	if len(judged) == 0:
		raise ValueError('nothing to rethink: no judged candidates')

	ranked = sorted(judged, reverse=True)
	satisfied = ranked[0] >= threshold and (len(ranked) == 1 or ranked[0] - ranked[1] >= min_gap)
	return RethinkVerdict(satisfied=satisfied, raw=f'rule: top={ranked[0]:.4f}')


def _description(ctx: AlignmentContext, kg: KnowledgeGraph, e: int, target: int) -> str:
	if not ctx.codec.uses_descriptions:
		return ''
	return generate_description(ctx.backend, kg, e, ctx.descriptions, ctx.codec, target)


def _reason(ctx: AlignmentContext, target: int, main_card: EntityCard, cand: int, round_no: int) -> Judgement:
	cand_card = ctx.codec.card(ctx.kg2, cand, _description(ctx, ctx.kg2, cand, target))
	messages = [
		ChatMessage(role='system', content=ctx.codec.system_prompt),
		ChatMessage(role='user', content=ctx.codec.reasoning(main_card, cand_card)),
	]
	reply = ctx.backend.chat(ctx.backend.request(messages), target)

	try:
		return Judgement(cand, parse_scores(reply.content, ctx.weights), round_no)
	except ReplyParseError as e:
		if not ctx.cfg.retry_on_parse_error:
			log_warning(f'unparseable scores for ({target}, {cand}): {e}, using the floor scores')
			return Judgement(cand, SimilarityScores.floor(ctx.weights), round_no, parse_failed=True)
		first_error = e

	messages += [
		ChatMessage(role='assistant', content=reply.content),
		ChatMessage(role='user', content=load_template('format_reminder').text),
	]
	reply = ctx.backend.chat(ctx.backend.request(messages), target)
	try:
		return Judgement(cand, parse_scores(reply.content, ctx.weights), round_no)
	except ReplyParseError as e:
		log_warning(
			f'unparseable scores for ({target}, {cand}) after a format reminder '
			f'({first_error}; {e}), using the floor scores'
		)
		return Judgement(cand, SimilarityScores.floor(ctx.weights), round_no, parse_failed=True)


def _rethink(ctx: AlignmentContext, target: int, judged: dict[int, Judgement], ranking: list[int]) -> RethinkVerdict:
	aggregates = [j.aggregate for j in judged.values()]
	if ctx.cfg.rethink == 'rule':
		return rethink_rule(aggregates, ctx.cfg.threshold, ctx.cfg.min_gap)

	order = final_ranking({c: j.aggregate for c, j in judged.items()}, ranking)[:len(judged)]
	pairs = [(ctx.kg2.entities[c], judged[c].aggregate) for c in order]
	messages = [
		ChatMessage(role='system', content=ctx.codec.system_prompt),
		ChatMessage(role='user', content=ctx.codec.rethinking(ctx.kg1.entities[target], pairs)),
	]
	reply = ctx.backend.chat(ctx.backend.request(messages), target)
	try:
		return parse_verdict(reply.content, ctx.strict_verdict)
	except ReplyParseError as e:
		log_warning(f'unparseable rethink verdict for {target} ({e}), falling back to the threshold rule')
		return rethink_rule(aggregates, ctx.cfg.threshold, ctx.cfg.min_gap)


def align_entity(target: int, ctx: AlignmentContext) -> AlignmentResult:
	'''
	Runs the scope schedule for one KG1 entity.

	Every round judges the candidates of the current scope that no earlier
	round judged, then rethinks over all judged candidates; a satisfied
	verdict stops the schedule. The last round ends without a rethink.
	A backend failure marks the result failed instead of raising.
	'''
	result = AlignmentResult(target=target)
	judged: dict[int, Judgement] = {}
	ranking = ctx.candidates.ranking(target)
	rounds = ctx.cfg.rounds

	try:
		main_card = ctx.codec.card(ctx.kg1, target, _description(ctx, ctx.kg1, target, target))
		for round_no, scope in enumerate(rounds, start=1):
			result.rounds_used = round_no
			for cand in ranking[:scope]:
				if cand not in judged:
					judged[cand] = _reason(ctx, target, main_card, cand, round_no)

			if round_no == len(rounds):
				break
			if _rethink(ctx, target, judged, ranking).satisfied:
				break
	except BackendError as e:
		log_error(f'alignment of entity {target} failed in round {result.rounds_used}: {e}')
		result.failed = True
		result.error = str(e)
		result.judged = list(judged.values())
		result.usage = ctx.backend.ledger.for_target(target)
		return result

	result.judged = list(judged.values())
	full = final_ranking({c: j.aggregate for c, j in judged.items()}, ranking)
	result.final_ranking = full[:ctx.cfg.ranking_depth]
	result.chosen = full[0] if full else None
	result.usage = ctx.backend.ledger.for_target(target)
	return result


def round_histogram(results: list[AlignmentResult], n_rounds: int) -> dict[int, float]:
	'''
	Share of targets finishing in each round 1..n_rounds; empty for no results.
	'''
	if len(results) == 0:
		return {}
	counts = Counter(r.rounds_used for r in results)
	return {r: counts.get(r, 0) / len(results) for r in range(1, n_rounds + 1)}


def align_all(
	targets: list[int] | tuple[int, ...],
	ctx: AlignmentContext,
	disable_progress: bool | None = None,
) -> list[AlignmentResult]:
	'''
	One result per target, in the order of `targets` whatever the worker count.
	'''
	if len(targets) == 0:
		return []

	with ThreadPoolExecutor(max_workers=ctx.cfg.workers) as pool:
		results = list(tqdm(
			pool.map(lambda t: align_entity(t, ctx), targets),
			total=len(targets),
			desc='aligning',
			disable=disable_progress,
		))

	histogram = round_histogram(results, len(ctx.cfg.rounds))
	failed = sum(r.failed for r in results)
	log_info(
		f'aligned {len(results)} entities ({failed} failed), rounds: '
		+ ', '.join(f'{r}: {p:.1%}' for r, p in histogram.items())
	)
	return results
