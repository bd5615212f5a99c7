import json
from hashlib import sha256
from os import getenv
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from ruamel.yaml import YAML

from .backends import backends
from .chain import AlignConfig
from .errors import ConfigError
from .features import CslsConfig, TrainConfig, WalkConfig
from .prompts import Ablation, ReasoningVariant, template_hashes

ViewName = Literal['name', 'structure', 'time']


class _Section(BaseModel):
	model_config = ConfigDict(extra='forbid', frozen=True)


class SyntheticConfig(_Section):
	n_entities: int = Field(100, ge=2)
	seed: int = 0
	name_noise: float = Field(0.3, ge=0, le=1)
	temporal: bool = True
	facts_per_entity: int = Field(3, ge=1)


class DatasetConfig(_Section):
	'''
	Either a benchmark directory (`triples_1`, `ent_ids_1`, `rel_ids_1`, the
	same with suffix 2, and the anchors file) or a generated synthetic pair.
	'''
	directory: str | None = None
	synthetic: SyntheticConfig | None = None
	temporal: bool = True
	anchors_file: str = 'ref_ent_ids'
	split_seed: int = 0
	train_ratio: float = Field(0.3, gt=0, lt=1)

	@model_validator(mode='after')
	def one_source(self):
		if (self.directory is None) == (self.synthetic is None):
			raise ValueError('dataset needs exactly one of "directory" or "synthetic"')
		return self


class ViewDims(_Section):
	name: int = Field(64, ge=1)
	structure: int = Field(64, ge=1)
	# even: start and end halves
	time: int = Field(64, ge=2, multiple_of=2)


class FeaturesConfig(_Section):
	views: tuple[ViewName, ...] = ('name', 'structure', 'time')
	dims: ViewDims = ViewDims()
	# width of the hashed name vectors before whitening
	name_hash_dim: int = Field(128, ge=1)
	# optional pretrained name vectors for KG1 and KG2
	name_vectors: tuple[str, str] | None = None
	time_epoch: float = 2000.0
	time_seed: int = 0
	walk: WalkConfig = WalkConfig()
	train: TrainConfig = TrainConfig()
	csls: CslsConfig = CslsConfig()

	@model_validator(mode='after')
	def known_views(self):
		if len(self.views) == 0 or len(set(self.views)) != len(self.views):
			raise ValueError(f'views must be a non-empty list without repeats, got {self.views}')
		return self


class PromptConfig(_Section):
	cap: int = Field(5, ge=0)
	variant: ReasoningVariant = ReasoningVariant.DEFAULT
	reasoning_case: str | None = None
	rethinking_examples: str | None = None
	weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
	strict_verdict: bool = False


class AlignSection(AlignConfig):
	ablations: tuple[Ablation, ...] = ()

	def loop_config(self) -> AlignConfig:
		'''
		The aligner settings with the two-stage ablation applied.
		'''
		values = self.model_dump(exclude={'ablations'})
		if Ablation.NO_TWO_STAGE in self.ablations:
			values['two_stage'] = False
		return AlignConfig(**values)


class RunConfig(_Section):
	dataset: DatasetConfig
	features: FeaturesConfig = FeaturesConfig()
	prompt: PromptConfig = PromptConfig()
	align: AlignSection = AlignSection()
	backend: tuple[str, dict]
	output_dir: str = 'output'


def _first_in_list(
	input_dict: dict[str, dict],
	supported_list: list[str]
) -> tuple[str, dict] | None:
	'''
	Find the first key of the input dict that is in the supported list.
	'''
	for input_item, value in input_dict.items():
		if input_item in supported_list:
			return (input_item, value or {})

	return None


def parse_config(raw: dict) -> RunConfig:
	if not isinstance(raw, dict):
		raise ConfigError('the config file must hold a mapping')

	raw = dict(raw)
	backend_section = raw.pop('backend', None) or {}
	if not isinstance(backend_section, dict):
		raise ConfigError('backend must be a mapping of backend name to its settings')

	backend = _first_in_list(backend_section, backends)
	if not backend:
		raise ConfigError(f'backend should be at least one of {backends} in the config file')

	try:
		return RunConfig.model_validate({**raw, 'backend': backend})
	except ValidationError as e:
		raise ConfigError(f'invalid config: {e}') from None


def get_config(file_path: str | None = None) -> RunConfig:
	'''
	Reads and validates the YAML config; `CHATEA_CONFIG` names the file when
	no path is given, then `config.yaml`.
	'''
	file_path = file_path or getenv('CHATEA_CONFIG', 'config.yaml')
	try:
		with open(file_path) as f:
			yaml = YAML(typ='safe')
			raw = yaml.load(f)
	except Exception as e:
		raise ConfigError(f'could not load config from {file_path}: {e}') from e

	return parse_config(raw or {})


def config_fingerprint(config: RunConfig) -> str:
	'''
	sha256 over the canonical JSON of the settings and the prompt template hashes.
	'''
	canonical = json.dumps(
		{'config': config.model_dump(mode='json'), 'templates': template_hashes()},
		sort_keys=True,
		separators=(',', ':'),
	)
	return sha256(canonical.encode('utf-8')).hexdigest()
