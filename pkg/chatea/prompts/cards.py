from dataclasses import dataclass
from enum import Enum

from ..kg import KnowledgeGraph, entity_tuples
from .templates import load_template, read_asset


class Ablation(str, Enum):
	NO_NAME = 'no-name'
	NO_STRUCTURE = 'no-structure'
	NO_TEMPORAL = 'no-temporal'
	NO_CODE = 'no-code'
	NO_DESCRIPTION = 'no-description'
	NO_TWO_STAGE = 'no-two-stage'


class ReasoningVariant(str, Enum):
	DEFAULT = 'default'
	# the phrasing of the recorded case-study transcript
	TRANSCRIPT = 'transcript'


RenderedTuple = tuple[str, str, str, str, str]


@dataclass(frozen=True)
class EntityCard:
	name: str
	id: str
	description: str
	tuples: tuple[RenderedTuple, ...]


def build_card(
	kg: KnowledgeGraph,
	e: int,
	description: str = '',
	cap: int = 5,
	ablations: frozenset[Ablation] = frozenset(),
) -> EntityCard:
	'''
	Code view of entity `e`: surface name, id, description and at most `cap`
	incident facts with surface names. Ablations blank the matching slots.
	'''
	own_name = '' if Ablation.NO_NAME in ablations else kg.entities[e]

	def surface(x: int) -> str:
		return own_name if x == e else kg.entities[x]

	tuples: tuple[RenderedTuple, ...] = ()
	if Ablation.NO_STRUCTURE not in ablations:
		no_time = Ablation.NO_TEMPORAL in ablations
		tuples = tuple(
			(
				surface(f.head),
				kg.relations[f.relation],
				surface(f.tail),
				'~' if no_time else str(f.start_time),
				'~' if no_time else str(f.end_time),
			)
			for f in entity_tuples(kg, e, cap)
		)

	return EntityCard(
		name=own_name,
		id=str(e),
		description='' if Ablation.NO_DESCRIPTION in ablations else description,
		tuples=tuples,
	)


def _quote(text: str) -> str:
	return "'" + text.replace('\\', '\\\\').replace("'", "\\'") + "'"


def render_tuples(tuples: tuple[RenderedTuple, ...]) -> str:
	return '[' + ', '.join(f'({", ".join(t)})' for t in tuples) + ']'


def render_card(card: EntityCard, code: bool = True) -> str:
	'''
	Code form: Entity('<name>', '<id>', '<description>', [(h, r, t, ts, te), ...]).
	'''
	if code:
		fields = ', '.join(_quote(v) for v in (card.name, card.id, card.description))
		return f'Entity({fields}, {render_tuples(card.tuples)})'
	return f'Name: {card.name}, ID: {card.id}, Description: {card.description}, Tuples: {render_tuples(card.tuples)}'


def render_system_prompt(reasoning_case: str | None = None, code: bool = True) -> str:
	case = reasoning_case if reasoning_case is not None else load_template('reasoning_case').text
	if case.strip() == '':
		raise ValueError('the reasoning case must not be empty')
	return load_template('system' if code else 'system_plain').render(reasoning_case=case)


def render_reasoning_prompt(
	main: EntityCard,
	cand: EntityCard,
	variant: ReasoningVariant = ReasoningVariant.DEFAULT,
	code: bool = True,
) -> str:
	name = 'reasoning' if variant == ReasoningVariant.DEFAULT else 'reasoning_transcript'
	return load_template(name).render(main_card=render_card(main, code), cand_card=render_card(cand, code))


def render_rethinking_prompt(
	main_name: str,
	judged: list[tuple[str, float]],
	examples: str | None = None,
) -> str:
	'''
	Args
	----
	main_name: str
	judged: list of (candidate name, aggregate)
		Non-empty, aggregate non-increasing
	examples: str, optional
		Few-shot body, the bundled exemplars by default
	'''
	if len(judged) == 0:
		raise ValueError('nothing to rethink: no judged candidates')
	if any(a[1] < b[1] for a, b in zip(judged, judged[1:], strict=False)):
		raise ValueError('judged candidates must be sorted by aggregate, highest first')

	pairs = '[' + ', '.join(f'({name}, {score:.2f})' for name, score in judged) + ']'
	return load_template('rethinking').render(
		main_name=main_name,
		align_pairs=pairs,
		examples=examples if examples is not None else load_template('rethinking_examples').text,
	)


def render_description_prompt(card: EntityCard) -> str:
	return load_template('describe').render(name=card.name, id=card.id, tuples=render_tuples(card.tuples))


class PromptCodec:
	'''
	All prompt settings of one run: template variant, few-shot exemplars,
	tuple cap and renderer ablations.
	'''
	def __init__(
		self,
		cap: int = 5,
		variant: ReasoningVariant = ReasoningVariant.DEFAULT,
		ablations: frozenset[Ablation] = frozenset(),
		reasoning_case_path: str | None = None,
		rethinking_examples_path: str | None = None,
	):
		self.cap = cap
		self.variant = variant
		self.ablations = frozenset(ablations)
		self.code = Ablation.NO_CODE not in self.ablations
		self.reasoning_case = read_asset(reasoning_case_path) if reasoning_case_path else None
		self.rethinking_examples = read_asset(rethinking_examples_path) if rethinking_examples_path else None
		self.system_prompt = render_system_prompt(self.reasoning_case, self.code)

	@property
	def uses_descriptions(self) -> bool:
		return Ablation.NO_DESCRIPTION not in self.ablations

	def card(self, kg: KnowledgeGraph, e: int, description: str = '') -> EntityCard:
		return build_card(kg, e, description, self.cap, self.ablations)

	def reasoning(self, main: EntityCard, cand: EntityCard) -> str:
		return render_reasoning_prompt(main, cand, self.variant, self.code)

	def rethinking(self, main_name: str, judged: list[tuple[str, float]]) -> str:
		return render_rethinking_prompt(main_name, judged, self.rethinking_examples)

	def describe(self, kg: KnowledgeGraph, e: int) -> str:
		return render_description_prompt(build_card(kg, e, '', self.cap))
