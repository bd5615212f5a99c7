import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, ValidationError

from ..backends import Usage
from ..chain import AlignmentResult, Judgement
from ..errors import ResultsSchemaError
from ..prompts import SimilarityScores


class _JudgedRecord(BaseModel):
	model_config = ConfigDict(extra='forbid')

	candidate: int
	scores: tuple[int, int, int, int]
	weights: tuple[float, float, float, float]
	aggregate: float
	round: int
	parse_failed: bool


class _UsageRecord(BaseModel):
	model_config = ConfigDict(extra='forbid')

	calls: int
	prompt_tokens: int
	completion_tokens: int
	time: float
	estimated: bool


class _ResultRecord(BaseModel):
	model_config = ConfigDict(extra='forbid')

	target: int
	chosen: int | None
	rounds_used: int
	failed: bool
	error: str | None
	judged: list[_JudgedRecord]
	final_ranking: list[int]
	usage: _UsageRecord


def write_results(results: list[AlignmentResult], path: str | Path) -> Path:
	'''
	One JSON object per line, keys sorted, in the order of `results`.
	'''
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with open(path, 'w', encoding='utf-8') as f:
		for result in results:
			f.write(json.dumps(result.to_record(), sort_keys=True, ensure_ascii=False) + '\n')
	return path


def _to_result(record: _ResultRecord) -> AlignmentResult:
	return AlignmentResult(
		target=record.target,
		judged=[
			Judgement(
				candidate=j.candidate,
				scores=SimilarityScores(*j.scores, weights=j.weights),
				round=j.round,
				parse_failed=j.parse_failed,
			)
			for j in record.judged
		],
		final_ranking=list(record.final_ranking),
		chosen=record.chosen,
		rounds_used=record.rounds_used,
		usage=Usage(**record.usage.model_dump()),
		failed=record.failed,
		error=record.error,
	)


def load_results(path: str | Path) -> list[AlignmentResult]:
	'''
	Raises
	------
	ResultsSchemaError
		Naming the line (and target, when readable) of the first bad record
	'''
	path = Path(path)
	results = []
	with open(path, encoding='utf-8') as f:
		for line_no, line in enumerate(f, start=1):
			if not line.strip():
				continue
			try:
				raw = json.loads(line)
			except json.JSONDecodeError as e:
				raise ResultsSchemaError(f'{path}:{line_no}: not a JSON object ({e})') from e

			try:
				record = _ResultRecord.model_validate(raw)
				results.append(_to_result(record))
			except (ValidationError, ValueError) as e:
				target = raw.get('target') if isinstance(raw, dict) else None
				raise ResultsSchemaError(f'{path}:{line_no}: invalid record for target {target}: {e}') from e
	return results
