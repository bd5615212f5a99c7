import json
from abc import ABC, abstractmethod
from hashlib import sha256
from threading import BoundedSemaphore
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .ledger import UsageLedger
from .transcript import TranscriptRecorder


class ChatMessage(BaseModel):
	model_config = ConfigDict(frozen=True)

	role: Literal['system', 'user', 'assistant']
	content: str


class ChatRequest(BaseModel):
	model_config = ConfigDict(frozen=True)

	model: str
	messages: tuple[ChatMessage, ...]
	temperature: float = 0.0
	max_tokens: int = Field(1024, ge=1)

	@field_validator('messages')
	@classmethod
	def system_prompt_first(cls, value: tuple[ChatMessage, ...]):
		if len(value) == 0:
			raise ValueError('a chat request needs at least one message')
		if value[0].role != 'system':
			raise ValueError('the first message must be the system prompt')
		return value

	def fingerprint(self) -> str:
		'''
		Stable digest of everything that determines the reply.
		'''
		payload = json.dumps(self.model_dump(mode='json'), sort_keys=True, ensure_ascii=False)
		return sha256(payload.encode('utf-8')).hexdigest()

	@property
	def last_user_message(self) -> str:
		for message in reversed(self.messages):
			if message.role == 'user':
				return message.content
		return ''


class ChatReply(BaseModel):
	model_config = ConfigDict(frozen=True)

	content: str
	prompt_tokens: int = Field(0, ge=0)
	completion_tokens: int = Field(0, ge=0)
	latency: float = Field(0.0, ge=0)
	# token counts come from the whitespace estimate, not the server
	estimated: bool = False


def estimate_tokens(text: str) -> int:
	'''
	Whitespace pieces, a rough stand-in when the server reports no usage.
	'''
	return len(text.split())


def estimated_reply(request: ChatRequest, content: str, latency: float = 0.0) -> ChatReply:
	return ChatReply(
		content=content,
		prompt_tokens=sum(estimate_tokens(m.content) for m in request.messages),
		completion_tokens=estimate_tokens(content),
		latency=latency,
		estimated=True,
	)


class BaseChatBackend(ABC):
	'''
	`chat` may be called from any number of threads: at most `max_in_flight`
	requests are admitted at once and usage lands in one shared ledger.
	'''
	def __init__(
		self,
		model: str,
		max_in_flight: int = 4,
		ledger: UsageLedger | None = None,
		recorder: TranscriptRecorder | None = None,
		temperature: float = 0.0,
		max_tokens: int = 1024,
	):
		if max_in_flight < 1:
			raise ValueError('max_in_flight must be at least 1')
		self.model = model
		self.temperature = temperature
		self.max_tokens = max_tokens
		self.max_in_flight = max_in_flight
		self.ledger = ledger if ledger is not None else UsageLedger()
		self.recorder = recorder
		self._limiter = BoundedSemaphore(max_in_flight)

	def request(self, messages: list[ChatMessage] | tuple[ChatMessage, ...]) -> ChatRequest:
		return ChatRequest(
			model=self.model,
			messages=tuple(messages),
			temperature=self.temperature,
			max_tokens=self.max_tokens,
		)

	def chat(self, request: ChatRequest, target: int | None = None) -> ChatReply:
		'''
		Args
		----
		request: ChatRequest
		target: int, optional
			KG1 entity whose alignment this call serves; usage is booked to it

		Returns
		-------
		ChatReply
		'''
		with self._limiter:
			reply = self._complete(request)

		self.ledger.record(target, reply)
		if self.recorder is not None:
			self.recorder.write(request, reply, target)
		return reply

	@abstractmethod
	def _complete(self, request: ChatRequest) -> ChatReply:
		...

	def check(self) -> None:
		'''
		Startup probe, raises a BackendError when the backend cannot serve.
		'''

	def close(self) -> None:
		if self.recorder is not None:
			self.recorder.close()
