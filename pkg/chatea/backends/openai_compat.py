from logging import warning as log_warning
from os import getenv
from time import perf_counter

import httpx
from pydantic import BaseModel, ConfigDict, Field
from tenacity import RetryCallState, Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..errors import BackendError, BackendHTTPError, ConfigError, TransportError
from .base import BaseChatBackend, ChatReply, ChatRequest, estimated_reply

_RETRY_STATUS = {408, 409, 429}


class OpenAICompatConfig(BaseModel):
	model_config = ConfigDict(extra='forbid')

	base_url: str
	model: str
	temperature: float = 0.0
	max_tokens: int = Field(1024, ge=1)
	max_in_flight: int = Field(4, ge=1)
	timeout: float = Field(120.0, gt=0)
	max_attempts: int = Field(5, ge=1)
	backoff: float = Field(1.0, ge=0)
	max_backoff: float = Field(30.0, ge=0)
	startup_check: bool = True


class _RetryableStatus(Exception):
	def __init__(self, status_code: int, body: str):
		super().__init__(f'{status_code}: {body}')
		self.status_code = status_code
		self.body = body


def _log_retry(state: RetryCallState) -> None:
	exc = state.outcome.exception() if state.outcome else None
	log_warning(f'chat request failed ({exc}), attempt {state.attempt_number}, retrying')


class OpenAICompatBackend(BaseChatBackend):
	'''
	Client for any server exposing POST <base_url>/chat/completions.
	The bearer token comes from the CHATEA_API_KEY environment variable.
	'''
	def __init__(self, cfg: OpenAICompatConfig, transport: httpx.BaseTransport | None = None, **kwargs):
		super().__init__(
			cfg.model,
			max_in_flight=cfg.max_in_flight,
			temperature=cfg.temperature,
			max_tokens=cfg.max_tokens,
			**kwargs,
		)
		self.cfg = cfg
		headers = {'Content-Type': 'application/json'}
		if (api_key := getenv('CHATEA_API_KEY')):
			headers['Authorization'] = f'Bearer {api_key}'

		self._client = httpx.Client(
			base_url=cfg.base_url.removesuffix('/'),
			headers=headers,
			timeout=cfg.timeout,
			transport=transport,
		)

	def _post(self, payload: dict) -> dict:
		resp = self._client.post('/chat/completions', json=payload)
		if resp.status_code in _RETRY_STATUS or resp.status_code >= 500:
			raise _RetryableStatus(resp.status_code, resp.text)
		if resp.status_code // 100 != 2:
			raise BackendHTTPError(resp.status_code, resp.text)
		return resp.json()

	def _complete(self, request: ChatRequest) -> ChatReply:
		payload = {
			'model': request.model,
			'messages': [m.model_dump() for m in request.messages],
			'temperature': request.temperature,
			'max_tokens': request.max_tokens,
		}

		retrying = Retrying(
			stop=stop_after_attempt(self.cfg.max_attempts),
			wait=wait_exponential(multiplier=self.cfg.backoff, max=self.cfg.max_backoff),
			retry=retry_if_exception_type((httpx.TransportError, _RetryableStatus)),
			before_sleep=_log_retry,
			reraise=True,
		)

		start = perf_counter()
		try:
			for attempt in retrying:
				with attempt:
					body = self._post(payload)
		except httpx.TransportError as e:
			raise TransportError(f'chat endpoint unreachable after {self.cfg.max_attempts} attempts: {e}') from e
		except _RetryableStatus as e:
			raise BackendHTTPError(e.status_code, e.body) from None
		latency = perf_counter() - start

		try:
			content = body['choices'][0]['message']['content'] or ''
		except (KeyError, IndexError, TypeError):
			raise BackendError(f'malformed chat completion response: {str(body)[:200]}') from None

		usage = body.get('usage') or {}
		if 'prompt_tokens' in usage and 'completion_tokens' in usage:
			return ChatReply(
				content=content,
				prompt_tokens=int(usage['prompt_tokens']),
				completion_tokens=int(usage['completion_tokens']),
				latency=latency,
			)

		return estimated_reply(request, content, latency)

	def check(self) -> None:
		if not self.cfg.startup_check:
			return
		try:
			resp = self._client.get('/models')
		except httpx.TransportError as e:
			raise TransportError(f'chat endpoint {self.cfg.base_url} is unreachable: {e}') from e
		if resp.status_code // 100 != 2:
			raise BackendHTTPError(resp.status_code, resp.text)

	def close(self) -> None:
		self._client.close()
		super().close()


def get_backend(config: dict, transport: httpx.BaseTransport | None = None, **kwargs) -> OpenAICompatBackend:
	kwargs.pop('gold', None)
	try:
		cfg = OpenAICompatConfig.model_validate(config)
	except ValueError as e:
		raise ConfigError(f'invalid openai_compat backend config: {e}') from None
	return OpenAICompatBackend(cfg, transport=transport, **kwargs)
