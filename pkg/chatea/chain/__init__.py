from .aligner import (
	AlignConfig,
	AlignmentContext,
	AlignmentResult,
	CandidateSource,
	Judgement,
	align_all,
	align_entity,
	final_ranking,
	rethink_rule,
	round_histogram,
)

__all__ = [
	'AlignConfig',
	'AlignmentContext',
	'AlignmentResult',
	'CandidateSource',
	'Judgement',
	'align_all',
	'align_entity',
	'final_ranking',
	'rethink_rule',
	'round_histogram',
]
