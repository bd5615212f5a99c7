import csv
from logging import warning as log_warning
from pathlib import Path
from threading import Lock

from ..backends.base import BaseChatBackend, ChatMessage
from ..errors import BackendError
from ..kg import KnowledgeGraph
from .cards import PromptCodec

DescriptionKey = tuple[str, int, str]


class DescriptionCache:
	'''
	Descriptions keyed by (kg name, entity id, model id), persisted as CSV
	records "kg,entity_id,model,text". Reads are concurrent; each key has its
	own lock so one entity is described at most once, and file appends are
	serialized.
	'''
	def __init__(self, path: str | Path | None = None):
		self.path = Path(path) if path is not None else None
		self._entries: dict[DescriptionKey, str] = {}
		self._write_lock = Lock()
		self._key_locks: dict[DescriptionKey, Lock] = {}
		self._key_locks_lock = Lock()

		if self.path is not None and self.path.exists():
			with open(self.path, encoding='utf-8', newline='') as f:
				for row in csv.reader(f):
					if len(row) != 4:
						continue
					kg, entity_id, model, text = row
					self._entries[(kg, int(entity_id), model)] = text

	@classmethod
	def fresh(cls, path: str | Path) -> 'DescriptionCache':
		'''
		An empty cache persisted at `path`, dropping what an earlier run left there.
		'''
		Path(path).unlink(missing_ok=True)
		return cls(path)

	def __len__(self) -> int:
		return len(self._entries)

	def get(self, key: DescriptionKey) -> str | None:
		return self._entries.get(key)

	def put(self, key: DescriptionKey, text: str) -> None:
		with self._write_lock:
			self._entries[key] = text
			if self.path is not None:
				self.path.parent.mkdir(parents=True, exist_ok=True)
				with open(self.path, 'a', encoding='utf-8', newline='') as f:
					csv.writer(f, lineterminator='\n').writerow([key[0], key[1], key[2], text])

	def key_lock(self, key: DescriptionKey) -> Lock:
		with self._key_locks_lock:
			return self._key_locks.setdefault(key, Lock())


def single_paragraph(text: str) -> str:
	return ' '.join(text.split())


def generate_description(
	backend: BaseChatBackend,
	kg: KnowledgeGraph,
	e: int,
	cache: DescriptionCache | None,
	codec: PromptCodec,
	target: int | None = None,
) -> str:
	'''
	Cached entity description; on a miss, one chat call with the entity's name
	and capped tuples. A failed call yields '' and is not cached.

	Args
	----
	target: int, optional
		KG1 entity whose alignment triggered the call, for usage accounting
	'''
	key = (kg.name, e, backend.model)
	if cache is not None and (hit := cache.get(key)) is not None:
		return hit

	lock = cache.key_lock(key) if cache is not None else Lock()
	with lock:
		if cache is not None and (hit := cache.get(key)) is not None:
			return hit

		request = backend.request([
			ChatMessage(role='system', content=codec.system_prompt),
			ChatMessage(role='user', content=codec.describe(kg, e)),
		])
		try:
			reply = backend.chat(request, target)
		except BackendError as err:
			log_warning(f'description of entity {e} in {kg.name} failed, continuing without one: {err}')
			return ''

		text = single_paragraph(reply.content)
		if cache is not None:
			cache.put(key, text)
		return text
