from collections.abc import Mapping, Sequence
from pathlib import Path

import pandas as pd
from pydantic import BaseModel, ConfigDict
from tabulate import tabulate

from ..backends import Usage
from ..chain import AlignmentResult, round_histogram
from .metrics import gold_ranks, hits_from_ranks, mrr_from_ranks

REPORT_COLUMNS = [
	'targets',
	'failed',
	'hits1',
	'hits10',
	'mrr',
	'avg_tokens',
	'avg_time',
	'avg_calls',
	'tokens_estimated',
	'fingerprint',
]


class EvalReport(BaseModel):
	model_config = ConfigDict(extra='forbid', frozen=True)

	targets: int
	failed: int = 0
	hits1: float = 0.0
	hits10: float = 0.0
	mrr: float = 0.0
	# share of targets finishing in each round, keys 1..n_rounds
	rounds: dict[int, float] = {}
	avg_tokens: float = 0.0
	avg_time: float = 0.0
	avg_calls: float = 0.0
	tokens_estimated: bool = False
	fingerprint: str | None = None

	@property
	def no_data(self) -> bool:
		return self.targets == 0

	def row(self) -> dict:
		row = {c: getattr(self, c) for c in REPORT_COLUMNS}
		row.update({f'round_{r}': p for r, p in sorted(self.rounds.items())})
		return row


def build_report(
	results: Sequence[AlignmentResult],
	gold: Mapping[int, int],
	n_rounds: int,
	fingerprint: str | None = None,
) -> EvalReport:
	'''
	Metrics, round shares and average per-target usage. The result order does
	not matter. No results gives an explicit empty report.
	'''
	if len(results) == 0:
		return EvalReport(targets=0, fingerprint=fingerprint)

	ordered = sorted(results, key=lambda r: r.target)
	ranks = gold_ranks(ordered, gold)
	usage = Usage()
	for r in ordered:
		usage.add(r.usage)

	n = len(ordered)
	return EvalReport(
		targets=n,
		failed=sum(r.failed for r in ordered),
		hits1=hits_from_ranks(ranks, 1),
		hits10=hits_from_ranks(ranks, 10),
		mrr=mrr_from_ranks(ranks),
		rounds=round_histogram(ordered, n_rounds),
		avg_tokens=usage.tokens / n,
		avg_time=usage.time / n,
		avg_calls=usage.calls / n,
		tokens_estimated=usage.estimated,
		fingerprint=fingerprint,
	)


def render_text(report: EvalReport) -> str:
	if report.no_data:
		return 'no data: the results contain no targets'

	metrics = [
		['targets', report.targets],
		['failed', report.failed],
		['Hits@1', f'{report.hits1:.4f}'],
		['Hits@10', f'{report.hits10:.4f}'],
		['MRR', f'{report.mrr:.4f}'],
		['avg tokens' + (' (estimated)' if report.tokens_estimated else ''), f'{report.avg_tokens:.1f}'],
		['avg time (s)', f'{report.avg_time:.2f}'],
		['avg calls', f'{report.avg_calls:.2f}'],
	]
	rounds = [[f'round {r}', f'{p:.2%}'] for r, p in sorted(report.rounds.items())]

	text = tabulate(metrics, headers=['metric', 'value'], tablefmt='github')
	if rounds:
		text += '\n\n' + tabulate(rounds, headers=['finished in', 'share'], tablefmt='github')
	if report.fingerprint:
		text += f'\n\nconfig fingerprint: {report.fingerprint}'
	return text


def write_report(report: EvalReport, directory: str | Path, stem: str = 'report') -> dict[str, Path]:
	'''
	Writes `<stem>.csv`, `<stem>.json` and `<stem>.txt`.

	Returns
	-------
	dict[str, Path]
		Written files by format
	'''
	directory = Path(directory)
	directory.mkdir(parents=True, exist_ok=True)
	paths = {
		'csv': directory / f'{stem}.csv',
		'json': directory / f'{stem}.json',
		'txt': directory / f'{stem}.txt',
	}

	pd.DataFrame([report.row()]).to_csv(paths['csv'], index=False, lineterminator='\n')
	paths['json'].write_text(report.model_dump_json(indent=2) + '\n', encoding='utf-8')
	paths['txt'].write_text(render_text(report) + '\n', encoding='utf-8')
	return paths
