'''
Robustness to embedding noise: overwrite a growing share of the fused
dimensions with uniform noise and compare CSLS-only Hits@1 with the Hits@1 of
the full reasoning loop over the same noised candidates.
'''
from collections.abc import Callable, Sequence
from logging import info as log_info
from pathlib import Path

import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..backends.oracle import OracleBackend, OracleNoise
from ..chain import AlignConfig, AlignmentContext, AlignmentResult, CandidateSource, align_all
from ..features import CslsConfig, CslsIndex, EmbeddingMatrix, inject_noise, noise_dims
from ..kg import KnowledgeGraph
from ..prompts import DescriptionCache, PromptCodec
from .metrics import embedding_hits, gold_outside_topk, hits_at_k

SWEEP_COLUMNS = ['ratio', 'seed', 'embedding_hits1', 'full_hits1', 'gold_outside_scope']

FullLoop = Callable[[CandidateSource], list[AlignmentResult]]


class SweepRow(BaseModel):
	model_config = ConfigDict(frozen=True)

	ratio: float
	seed: int
	embedding_hits1: float
	full_hits1: float | None
	# share of targets whose gold lies beyond the largest scope
	gold_outside_scope: float


def oracle_full_loop(
	kg1: KnowledgeGraph,
	kg2: KnowledgeGraph,
	pairs: Sequence[tuple[int, int]],
	codec: PromptCodec | None = None,
	align_cfg: AlignConfig | None = None,
	noise: OracleNoise | None = None,
	disable_progress: bool | None = True,
) -> FullLoop:
	'''
	A full-loop runner answering from gold. Descriptions are shared across
	noise ratios since they do not depend on the embeddings.
	'''
	gold = dict(pairs)
	codec = codec or PromptCodec()
	align_cfg = align_cfg or AlignConfig()
	descriptions = DescriptionCache()
	targets = [left for left, _ in pairs]

	def run(candidates: CandidateSource) -> list[AlignmentResult]:
		backend = OracleBackend(gold, noise)
		ctx = AlignmentContext(kg1, kg2, candidates, backend, codec, align_cfg, descriptions)
		return align_all(targets, ctx, disable_progress)

	return run


def noise_sweep(
	h1: EmbeddingMatrix,
	h2: EmbeddingMatrix,
	pairs: Sequence[tuple[int, int]],
	ratios: Sequence[float],
	seeds: Sequence[int] = (0,),
	full_loop: FullLoop | None = None,
	csls: CslsConfig | None = None,
	scope: int = 20,
) -> list[SweepRow]:
	'''
	One row per (ratio, seed). Both KGs lose the same dimensions; their noise
	values come from `seed` and `seed + 1`.

	Args
	----
	h1, h2: EmbeddingMatrix
		Trained embeddings of KG1 and KG2
	pairs: Sequence[tuple[int, int]]
		Test anchors
	full_loop: FullLoop, optional
		Runs the reasoning loop over a candidate source; without one only the
		embedding columns are filled
	scope: int
		Largest candidate scope, for the gold-outside share
	'''
	gold = dict(pairs)
	rows = []
	for ratio in ratios:
		for seed in seeds:
			dims = noise_dims(h1.dim, ratio, seed)
			index = CslsIndex(
				inject_noise(h1, ratio, seed, dims),
				inject_noise(h2, ratio, seed + 1, dims),
				csls,
			)
			full = None
			if full_loop is not None:
				full = hits_at_k(full_loop(index), gold, 1)

			row = SweepRow(
				ratio=ratio,
				seed=seed,
				embedding_hits1=embedding_hits(index, pairs, 1),
				full_hits1=full,
				gold_outside_scope=gold_outside_topk(index, pairs, scope),
			)
			log_info(
				f'noise {ratio:.0%} (seed {seed}): embedding Hits@1 {row.embedding_hits1:.4f}, '
				f'full loop Hits@1 {full if full is None else round(full, 4)}, '
				f'gold outside top-{scope} {row.gold_outside_scope:.4f}'
			)
			rows.append(row)
	return rows


def sweep_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
	# embedding-only sweeps leave full_hits1 as NaN
	frame = pd.DataFrame([r.model_dump() for r in rows], columns=SWEEP_COLUMNS)
	return frame.astype({'full_hits1': float})


def summarize_sweep(rows: Sequence[SweepRow]) -> pd.DataFrame:
	'''
	Mean of every column per ratio over seeds.
	'''
	frame = sweep_frame(rows).drop(columns='seed')
	return frame.groupby('ratio', as_index=False).mean()


def write_sweep(rows: Sequence[SweepRow], path: str | Path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	sweep_frame(rows).to_csv(path, index=False, lineterminator='\n')
	return path
