from importlib import import_module

from ..errors import ConfigError
from .base import BaseChatBackend, ChatMessage, ChatReply, ChatRequest, estimate_tokens
from .ledger import Usage, UsageLedger
from .transcript import TranscriptRecorder, load_transcript

backends = ['openai_compat', 'scripted', 'oracle']

__all__ = [
	'BaseChatBackend',
	'ChatMessage',
	'ChatReply',
	'ChatRequest',
	'TranscriptRecorder',
	'Usage',
	'UsageLedger',
	'backends',
	'estimate_tokens',
	'init_backend',
	'load_transcript',
]


def init_backend(backend_info: tuple[str, dict], **kwargs) -> BaseChatBackend:
	'''
	Initializes the backend named in the config. Every backend lives in a
	module of the same name in this package exposing `get_backend`.

	Args
	----
	backend_info: tuple[str, dict]
		(backend name, its config section)
	kwargs: dict
		gold: dict[int, int]
			Gold anchors, used by the oracle
		ledger: UsageLedger
		recorder: TranscriptRecorder

	Returns
	-------
	BaseChatBackend
	'''
	name, config = backend_info
	if name not in backends:
		raise ConfigError(f'backend should be one of {backends}, got {name!r}')

	module = import_module(f'.{name}', 'chatea.backends')
	if not hasattr(module, 'get_backend'):
		raise ConfigError(f'could not load the {name} backend')

	return module.get_backend(config or {}, **kwargs)
