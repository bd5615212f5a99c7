from .metrics import embedding_hits, gold_outside_topk, gold_ranks, hits_at_k, mrr, rank_of
from .noise_sweep import SweepRow, noise_sweep, oracle_full_loop, summarize_sweep, write_sweep
from .report import REPORT_COLUMNS, EvalReport, build_report, render_text, write_report
from .results import load_results, write_results

__all__ = [
	'REPORT_COLUMNS',
	'EvalReport',
	'SweepRow',
	'build_report',
	'embedding_hits',
	'gold_outside_topk',
	'gold_ranks',
	'hits_at_k',
	'load_results',
	'mrr',
	'noise_sweep',
	'oracle_full_loop',
	'rank_of',
	'render_text',
	'summarize_sweep',
	'write_report',
	'write_results',
	'write_sweep',
]
