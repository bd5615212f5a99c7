from .cards import (
	Ablation,
	EntityCard,
	PromptCodec,
	ReasoningVariant,
	build_card,
	render_card,
	render_description_prompt,
	render_reasoning_prompt,
	render_rethinking_prompt,
	render_system_prompt,
)
from .descriptions import DescriptionCache, generate_description
from .parsing import LABELS, RethinkVerdict, SimilarityScores, parse_scores, parse_verdict
from .templates import load_template, template_hashes

__all__ = [
	'LABELS',
	'Ablation',
	'DescriptionCache',
	'EntityCard',
	'PromptCodec',
	'ReasoningVariant',
	'RethinkVerdict',
	'SimilarityScores',
	'build_card',
	'generate_description',
	'load_template',
	'parse_scores',
	'parse_verdict',
	'render_card',
	'render_description_prompt',
	'render_reasoning_prompt',
	'render_rethinking_prompt',
	'render_system_prompt',
	'template_hashes',
]
