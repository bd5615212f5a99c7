'''
Gold-answering stand-in for a chat model. It reads the entity ids back out
of the rendered prompts, so a renderer regression shows up as a lookup error.
'''
import re
from hashlib import blake2b
from threading import Lock

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ConfigError, OracleLookupError
from ..prompts.parsing import SimilarityScores
from .base import BaseChatBackend, ChatReply, ChatRequest, estimated_reply

_CODE_CARD = re.compile(r"Entity\('((?:[^'\\]|\\.)*)', '(\d+)'")
_PLAIN_CARD = re.compile(r'Name: (.*?), ID: (\d+),')
_RETHINK_LINE = re.compile(r'^\[Main Entity\]: (.*) -> \[(.*)\]$', re.MULTILINE)
_PAIR = re.compile(r'\((.*?), (-?\d+\.\d+)\)')
_UNESCAPE = re.compile(r'\\(.)')

RETHINK_MARKER = 'Do these entity alignments are satisfactory enough'
REASONING_MARKER = '[Candidate Entity]'
DESCRIBE_MARKER = 'write a concise description'


class OracleNoise(BaseModel):
	model_config = ConfigDict(extra='forbid', frozen=True)

	seed: int = 0
	perturb: bool = True
	# scores of a non-gold pair before perturbation, each kept within [1, 3]
	base: tuple[int, int, int, int] = (2, 1, 2, 1)
	# the top pair needs this lead over the runner-up for a [YES]
	margin: float = Field(1.0, ge=0)


class OracleConfig(BaseModel):
	model_config = ConfigDict(extra='forbid')

	model: str = 'oracle'
	max_in_flight: int = Field(4, ge=1)
	noise: OracleNoise = OracleNoise()


def _cards(prompt: str) -> list[tuple[str, int]]:
	found = [(_UNESCAPE.sub(r'\1', name), int(e)) for name, e in _CODE_CARD.findall(prompt)]
	if not found:
		found = [(name, int(e)) for name, e in _PLAIN_CARD.findall(prompt)]
	return found


class OracleBackend(BaseChatBackend):
	def __init__(
		self,
		gold: dict[int, int],
		noise: OracleNoise | None = None,
		model: str = 'oracle',
		**kwargs,
	):
		super().__init__(model, **kwargs)
		self.gold = dict(gold)
		self.noise = noise or OracleNoise()
		self._lock = Lock()
		# (main name, candidate name) -> is the pair gold
		self._seen: dict[tuple[str, str], bool] = {}

	def _complete(self, request: ChatRequest) -> ChatReply:
		prompt = request.last_user_message
		if RETHINK_MARKER in prompt:
			content = self._rethink(prompt)
		elif REASONING_MARKER in prompt:
			content = self._reason(prompt)
		elif DESCRIBE_MARKER in prompt:
			content = self._describe(prompt)
		else:
			raise OracleLookupError(f'unrecognised prompt: {prompt[:120]!r}')
		return estimated_reply(request, content)

	def scores_for(self, main: int, cand: int) -> SimilarityScores:
		if self.gold.get(main) == cand:
			return SimilarityScores(5, 5, 5, 5)

		values = np.array(self.noise.base)
		if self.noise.perturb:
			key = blake2b(f'{main}|{cand}|{self.noise.seed}'.encode(), digest_size=8).digest()
			rng = np.random.default_rng(int.from_bytes(key, 'little'))
			values = values + rng.integers(-1, 2, size=4)
		return SimilarityScores(*(int(v) for v in np.clip(values, 1, 3)))

	def _reason(self, prompt: str) -> str:
		cards = _cards(prompt)
		if len(cards) != 2:
			raise OracleLookupError(f'expected two entity cards in the reasoning prompt, found {len(cards)}')

		(main_name, main), (cand_name, cand) = cards
		with self._lock:
			self._seen[(main_name, cand_name)] = self.gold.get(main) == cand
		return self.scores_for(main, cand).canonical_line()

	def _rethink(self, prompt: str) -> str:
		match = _RETHINK_LINE.search(prompt)
		pairs = _PAIR.findall(match.group(2)) if match else []
		if not pairs:
			raise OracleLookupError('no alignment pairs in the rethinking prompt')

		main_name = match.group(1)
		top_name, top_score = pairs[0]
		with self._lock:
			is_gold = self._seen.get((main_name, top_name))
		if is_gold is None:
			raise OracleLookupError(f'rethinking about a pair never judged: {main_name!r} -> {top_name!r}')

		confident = len(pairs) == 1 or float(top_score) - float(pairs[1][1]) >= self.noise.margin
		return '[YES]' if is_gold and confident else '[NO]'

	def _describe(self, prompt: str) -> str:
		cards = _cards(prompt)
		if len(cards) != 1:
			raise OracleLookupError('expected one entity card in the description prompt')
		name, e = cards[0]
		return f'{name} is entity {e} of its knowledge graph.'


def get_backend(config: dict, gold: dict[int, int] | None = None, **kwargs) -> OracleBackend:
	if gold is None:
		raise ConfigError('the oracle backend needs the gold anchors')
	try:
		cfg = OracleConfig.model_validate(config)
	except ValueError as e:
		raise ConfigError(f'invalid oracle backend config: {e}') from None
	return OracleBackend(gold, cfg.noise, cfg.model, max_in_flight=cfg.max_in_flight, **kwargs)
