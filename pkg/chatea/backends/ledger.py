from dataclasses import dataclass
from threading import Lock
from typing import TYPE_CHECKING

if TYPE_CHECKING:
	from .base import ChatReply


@dataclass
class Usage:
	calls: int = 0
	prompt_tokens: int = 0
	completion_tokens: int = 0
	# sum of reply latencies in seconds
	time: float = 0.0
	estimated: bool = False

	@property
	def tokens(self) -> int:
		return self.prompt_tokens + self.completion_tokens

	def add(self, other: 'Usage') -> None:
		self.calls += other.calls
		self.prompt_tokens += other.prompt_tokens
		self.completion_tokens += other.completion_tokens
		self.time += other.time
		self.estimated = self.estimated or other.estimated

	def to_dict(self) -> dict:
		return {
			'calls': self.calls,
			'prompt_tokens': self.prompt_tokens,
			'completion_tokens': self.completion_tokens,
			'time': self.time,
			'estimated': self.estimated,
		}


class UsageLedger:
	'''
	Token and time totals per target entity. Calls without a target are
	booked under None. Totals are always the sum over all keys.
	'''
	def __init__(self):
		self._lock = Lock()
		self._per_target: dict[int | None, Usage] = {}

	def record(self, target: int | None, reply: 'ChatReply') -> None:
		with self._lock:
			usage = self._per_target.setdefault(target, Usage())
			usage.calls += 1
			usage.prompt_tokens += reply.prompt_tokens
			usage.completion_tokens += reply.completion_tokens
			usage.time += reply.latency
			usage.estimated = usage.estimated or reply.estimated

	def for_target(self, target: int | None) -> Usage:
		with self._lock:
			usage = Usage()
			if target in self._per_target:
				usage.add(self._per_target[target])
			return usage

	def totals(self) -> Usage:
		with self._lock:
			total = Usage()
			for target in sorted(self._per_target, key=lambda t: (t is None, t or 0)):
				total.add(self._per_target[target])
			return total

	def targets(self) -> list[int | None]:
		with self._lock:
			return list(self._per_target)
