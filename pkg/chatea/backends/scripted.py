from collections import deque
from threading import Lock

from pydantic import BaseModel, ConfigDict, Field

from ..errors import ConfigError, TranscriptExhaustedError
from .base import BaseChatBackend, ChatReply, ChatRequest, estimated_reply
from .transcript import load_transcript


class ScriptedConfig(BaseModel):
	model_config = ConfigDict(extra='forbid')

	transcript: str
	# defaults to the model of the first recorded request
	model: str | None = None
	max_in_flight: int = Field(4, ge=1)


class ScriptedBackend(BaseChatBackend):
	'''
	Replays recorded replies. Keyed mode answers each request with the next
	unused reply recorded for an identical request; sequential mode hands out
	replies in order whatever the request.
	'''
	def __init__(
		self,
		model: str = 'scripted',
		records: list[tuple[ChatRequest, ChatReply]] | None = None,
		replies: list[str | ChatReply] | None = None,
		**kwargs,
	):
		super().__init__(model, **kwargs)
		if (records is None) == (replies is None):
			raise ValueError('pass either recorded (request, reply) pairs or a reply sequence')

		self._lock = Lock()
		self._sequence: deque[str | ChatReply] | None = None
		self._by_request: dict[str, deque[ChatReply]] = {}

		if replies is not None:
			self._sequence = deque(replies)
		else:
			for request, reply in records or []:
				self._by_request.setdefault(request.fingerprint(), deque()).append(reply)

	@classmethod
	def from_transcript(cls, path: str, model: str | None = None, **kwargs) -> 'ScriptedBackend':
		records = load_transcript(path)
		if model is None:
			model = records[0][0].model if records else 'scripted'
		return cls(model, records=records, **kwargs)

	def _complete(self, request: ChatRequest) -> ChatReply:
		with self._lock:
			if self._sequence is not None:
				if not self._sequence:
					raise TranscriptExhaustedError('scripted reply sequence is exhausted')
				reply = self._sequence.popleft()
				return reply if isinstance(reply, ChatReply) else estimated_reply(request, reply)

			queue = self._by_request.get(request.fingerprint())
			if not queue:
				raise TranscriptExhaustedError(
					f'no recorded reply left for request {request.fingerprint()[:12]}: '
					f'{request.last_user_message[:120]!r}'
				)
			return queue.popleft()

	def remaining(self) -> int:
		with self._lock:
			if self._sequence is not None:
				return len(self._sequence)
			return sum(len(q) for q in self._by_request.values())


def get_backend(config: dict, **kwargs) -> ScriptedBackend:
	kwargs.pop('gold', None)
	try:
		cfg = ScriptedConfig.model_validate(config)
	except ValueError as e:
		raise ConfigError(f'invalid scripted backend config: {e}') from None
	return ScriptedBackend.from_transcript(cfg.transcript, cfg.model, max_in_flight=cfg.max_in_flight, **kwargs)
