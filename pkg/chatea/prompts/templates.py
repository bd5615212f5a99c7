'''
Prompt templates shipped as text assets next to this module. Each asset is
pinned by the sha256 of its bytes, so an edited template fails loudly
instead of silently changing every prompt (and every recorded fixture).
'''
from functools import cache
from hashlib import sha256
from pathlib import Path
from string import Formatter

from ..errors import ChatEAError

TEMPLATE_DIR = Path(__file__).parent / 'templates'

TEMPLATE_SHA256 = {
	'describe': 'a70fca228d55b68fd3bbaa2fd230d01966e1a13f9d31f9df6155a31dc3cbf62f',
	'format_reminder': 'c570aa9d7535f1a7115fa9a63cd5138d92f29360eb29b070c75ad5f24d6ec6ea',
	'reasoning': 'eff05db38fdba217315667d49bdeac77f4fe4d1362ed42c87e0996556d72c85a',
	'reasoning_case': '1d47a252329d97aec1db873f2a09514b33fc30ef246096067c84d8d1626edbf4',
	'reasoning_transcript': 'ad737db0d6d1f3336f59392847543dd0e9b1c47d4cd56a3deaa764a1a1b75950',
	'rethinking': '23b3e6d7302c5200266a723e3a9873cc8ba9f3b47fc75195d56c76f15424ab30',
	'rethinking_examples': '23cddf95782889d6a7cee6228699c35946285534408b0a8b8e04ed716ed592d9',
	'system': '635964eed9384886f0d6af50d2e11504479ed3a6a6b6d6e9a18486d7641b33ec',
	'system_plain': '8c4e08965bc0288eed926049a13d4c48cd487e17ddcb4853d02ef7604d5b00ef',
}


class PromptTemplate:
	'''
	A `str.format` template with named fields.
	'''
	def __init__(self, name: str, text: str, digest: str):
		self.name = name
		self.text = text
		self.sha256 = digest

	def fields(self) -> list[str]:
		return [name for _, name, _, _ in Formatter().parse(self.text) if name is not None]

	def render(self, **values: str) -> str:
		missing = set(self.fields()) - set(values)
		if missing:
			raise KeyError(f'template {self.name} is missing values for {sorted(missing)}')
		return self.text.format(**values)


def read_asset(path: str | Path) -> str:
	'''
	File text with one trailing newline removed.
	'''
	text = Path(path).read_text(encoding='utf-8')
	return text[:-1] if text.endswith('\n') else text


@cache
def load_template(name: str) -> PromptTemplate:
	if name not in TEMPLATE_SHA256:
		raise ChatEAError(f'unknown prompt template {name!r}, expected one of {sorted(TEMPLATE_SHA256)}')

	path = TEMPLATE_DIR / f'{name}.txt'
	digest = sha256(path.read_bytes()).hexdigest()
	if digest != TEMPLATE_SHA256[name]:
		raise ChatEAError(f'prompt template {path} does not match its pinned hash ({digest})')

	return PromptTemplate(name, read_asset(path), digest)


def template_hashes() -> dict[str, str]:
	return dict(sorted(TEMPLATE_SHA256.items()))
