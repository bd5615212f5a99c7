import json
from pathlib import Path
from threading import Lock
from typing import TYPE_CHECKING

from ..errors import ChatEAError

if TYPE_CHECKING:
	from .base import ChatReply, ChatRequest


class TranscriptRecorder:
	'''
	Appends one {"request", "reply", "target"} JSON object per line.
	'''
	def __init__(self, path: str | Path):
		self.path = Path(path)
		self.path.parent.mkdir(parents=True, exist_ok=True)
		self._lock = Lock()
		self._file = open(self.path, 'w', encoding='utf-8')

	def write(self, request: 'ChatRequest', reply: 'ChatReply', target: int | None = None) -> None:
		line = json.dumps({
			'request': request.model_dump(mode='json'),
			'reply': reply.model_dump(mode='json'),
			'target': target,
		}, ensure_ascii=False, sort_keys=True)
		with self._lock:
			self._file.write(line + '\n')
			self._file.flush()

	def close(self) -> None:
		with self._lock:
			if not self._file.closed:
				self._file.close()


def load_transcript(path: str | Path) -> list[tuple['ChatRequest', 'ChatReply']]:
	from .base import ChatReply, ChatRequest

	records = []
	with open(path, encoding='utf-8') as f:
		for line_no, line in enumerate(f, start=1):
			if line.strip() == '':
				continue
			try:
				obj = json.loads(line)
				records.append((ChatRequest.model_validate(obj['request']), ChatReply.model_validate(obj['reply'])))
			except (ValueError, KeyError, TypeError) as e:
				raise ChatEAError(f'{path}:{line_no}: invalid transcript record: {e}') from None
	return records
