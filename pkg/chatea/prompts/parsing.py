import re
from dataclasses import dataclass

from ..errors import ReplyParseError

LABELS = (
	'NAME SIMILARITY',
	'PROBABILITY OF DESCRIPTION POINTING SAME ENTITY',
	'STRUCTURE SIMILARITY',
	'TIME SIMILARITY',
)

DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 1.0)


def _label_pattern(label: str) -> re.Pattern:
	words = r'\s+'.join(re.escape(w) for w in label.split())
	return re.compile(r'\[\s*' + words + r'\s*\]\s*=\s*(\d{1,9})\s*out\s+of\s+5', re.IGNORECASE)


_SCORE_PATTERNS = tuple(_label_pattern(label) for label in LABELS)
_BRACKETED_VERDICT = re.compile(r'\[\s*(yes|no)\s*\]', re.IGNORECASE)
# a bare verdict has its line to itself, optionally after "answer:"
_BARE_VERDICT = re.compile(r'^[ \t*]*(?:answer\s*:\s*)?(yes|no)[ \t*.!]*$', re.IGNORECASE | re.MULTILINE)


@dataclass(frozen=True)
class SimilarityScores:
	name: int
	description: int
	structure: int
	time: int
	weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS

	def __post_init__(self):
		for value in self.values:
			if value not in (1, 2, 3, 4, 5):
				raise ValueError(f'similarity scores are integers in [1, 5], got {self.values}')
		if len(self.weights) != 4 or any(w < 0 for w in self.weights) or sum(self.weights) <= 0:
			raise ValueError(f'invalid aggregate weights {self.weights}')

	@property
	def values(self) -> tuple[int, int, int, int]:
		return (self.name, self.description, self.structure, self.time)

	@property
	def aggregate(self) -> float:
		return sum(w * v for w, v in zip(self.weights, self.values, strict=True)) / sum(self.weights)

	def canonical_line(self) -> str:
		return ', '.join(f'[{label}] = {v} out of 5' for label, v in zip(LABELS, self.values, strict=True)) + '.'

	@classmethod
	def floor(cls, weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS) -> 'SimilarityScores':
		return cls(1, 1, 1, 1, weights)


def parse_scores(reply: str, weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS) -> SimilarityScores:
	'''
	Takes the last "[LABEL] = N out of 5" of each of the four labels.
	Case and whitespace are not significant.

	Raises
	------
	ReplyParseError
		A label is missing or its value is outside [1, 5]
	'''
	values = []
	for label, pattern in zip(LABELS, _SCORE_PATTERNS, strict=True):
		matches = pattern.findall(reply)
		if not matches:
			raise ReplyParseError(f'no numeric score for [{label}]', reply)
		value = int(matches[-1])
		if not 1 <= value <= 5:
			raise ReplyParseError(f'[{label}] = {value} is outside [1, 5]', reply)
		values.append(value)

	return SimilarityScores(*values, weights=weights)


@dataclass(frozen=True)
class RethinkVerdict:
	satisfied: bool
	raw: str


def parse_verdict(reply: str, strict: bool = False) -> RethinkVerdict:
	'''
	[YES] or [NO]; the last token wins. Lenient mode also takes a YES or NO
	standing alone on its line.
	'''
	tokens = [(m.start(), m.group(1).upper()) for m in _BRACKETED_VERDICT.finditer(reply)]
	if not strict:
		tokens.extend((m.start(), m.group(1).upper()) for m in _BARE_VERDICT.finditer(reply))

	if not tokens:
		raise ReplyParseError('no [YES] or [NO] in the reply', reply)

	_, last = max(tokens)
	return RethinkVerdict(satisfied=last == 'YES', raw=reply)
