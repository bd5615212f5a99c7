from logging import DEBUG, INFO
from logging import info as log_info
from os import getenv
from pathlib import Path
from typing import Annotated, Optional

import coloredlogs
import typer

from .backends import TranscriptRecorder, UsageLedger, init_backend
from .chain import AlignmentContext, align_all
from .config_parser import RunConfig, SyntheticConfig, config_fingerprint, get_config
from .errors import BackendError, ChatEAError
from .eval import build_report, load_results, render_text, write_report, write_results
from .features import CslsIndex
from .kg import neighbors, read_anchor_pairs, relations_of, serialize_kg, synthetic_pair, time_info, write_anchors
from .preprocess import load_checkpoints, load_dataset, run_preprocess
from .prompts import Ablation, DescriptionCache, PromptCodec, render_card
from .utils import exit_guard

app = typer.Typer(
	name='chatea',
	help='Entity alignment between two knowledge graphs with embedding candidates and chat-model reasoning.',
	no_args_is_help=True,
	add_completion=False,
)

ConfigOption = Annotated[
	Optional[str],  # noqa: UP007
	typer.Option('--config', '-c', help='YAML config, defaults to $CHATEA_CONFIG or config.yaml'),
]


def setup_logging():
	use_colors = getenv('USE_COLORS', '1') == '1' and getenv('CI', 'false') == 'false'
	coloredlogs.install(
		level=(INFO, DEBUG)[getenv('DEBUG', '0') == '1'],
		fmt='%(asctime)s %(levelname)s %(name)s %(message)s',
		isatty=use_colors,
	)


@app.callback()
def _():
	setup_logging()


def _with_overrides(
	config: RunConfig,
	ablations: list[Ablation] | None = None,
	workers: int | None = None,
	backend: tuple[str, dict] | None = None,
) -> RunConfig:
	align_update = {}
	if ablations:
		align_update['ablations'] = tuple(dict.fromkeys((*config.align.ablations, *ablations)))
	if workers is not None:
		align_update['workers'] = workers

	# revalidate so the overrides get the same checks as the file
	values = config.model_dump()
	values['align'] = {**values['align'], **align_update}
	if backend is not None:
		values['backend'] = backend
	return RunConfig.model_validate(values)


def _run_align(config: RunConfig, embeddings: Path | None = None):
	out = Path(config.output_dir)
	dataset = load_dataset(config.dataset)
	h1, h2 = load_checkpoints(embeddings or out, dataset)
	index = CslsIndex(h1, h2, config.features.csls)
	gold = dataset.anchors.gold()

	backend = init_backend(config.backend, gold=gold, ledger=UsageLedger())
	try:
		try:
			backend.check()
		except BackendError as e:
			raise ChatEAError(f'the {config.backend[0]} backend cannot serve requests: {e}') from e
		# attached after the backend is built, a replayed transcript may live at the same path
		backend.recorder = TranscriptRecorder(out / 'transcript.jsonl')

		codec = PromptCodec(
			cap=config.prompt.cap,
			variant=config.prompt.variant,
			ablations=frozenset(config.align.ablations),
			reasoning_case_path=config.prompt.reasoning_case,
			rethinking_examples_path=config.prompt.rethinking_examples,
		)
		loop = config.align.loop_config()
		ctx = AlignmentContext(
			kg1=dataset.kg1,
			kg2=dataset.kg2,
			candidates=index,
			backend=backend,
			codec=codec,
			cfg=loop,
			# descriptions never carry over from an earlier run
			descriptions=DescriptionCache.fresh(out / 'descriptions.csv'),
			weights=config.prompt.weights,
			strict_verdict=config.prompt.strict_verdict,
		)
		results = align_all([left for left, _ in dataset.anchors.test], ctx)
	finally:
		backend.close()

	write_results(results, out / 'results.jsonl')
	report = build_report(results, gold, len(loop.rounds), config_fingerprint(config))
	write_report(report, out)
	typer.echo(render_text(report))


@app.command()
@exit_guard
def preprocess(config: ConfigOption = None):
	'''
	Builds the multi-view embeddings of both KGs and writes the checkpoints.
	'''
	manifest = run_preprocess(get_config(config))
	typer.echo(f'wrote {manifest}')


@app.command()
@exit_guard
def align(
	config: ConfigOption = None,
	ablate: Annotated[
		Optional[list[Ablation]],  # noqa: UP007
		typer.Option('--ablate', help='Disable one part of the prompt or loop, repeatable'),
	] = None,
	workers: Annotated[Optional[int], typer.Option(min=1, help='Targets aligned concurrently')] = None,  # noqa: UP007
	embeddings: Annotated[
		Optional[Path],  # noqa: UP007
		typer.Option(help='Directory with another embeddings_1.bin / embeddings_2.bin pair'),
	] = None,
):
	'''
	Aligns every test entity, recording results, transcript and report.
	'''
	_run_align(_with_overrides(get_config(config), ablate, workers), embeddings)


@app.command()
@exit_guard
def replay(
	transcript: Annotated[Path, typer.Argument(help='Transcript recorded by an earlier align run')],
	config: ConfigOption = None,
	workers: Annotated[Optional[int], typer.Option(min=1)] = None,  # noqa: UP007
):
	'''
	Runs align with every chat reply answered from a recorded transcript.
	'''
	if not transcript.exists():
		raise FileNotFoundError(f'transcript {transcript} not found')
	run_config = _with_overrides(
		get_config(config),
		workers=workers,
		backend=('scripted', {'transcript': str(transcript)}),
	)
	_run_align(run_config)


@app.command(name='eval')
@exit_guard
def evaluate(
	results: Annotated[Path, typer.Argument(help='results.jsonl written by align')],
	gold: Annotated[Path, typer.Argument(help='Gold pairs, "id1<TAB>id2" per line')],
	rounds: Annotated[int, typer.Option(min=1, help='Rounds of the scope schedule used')] = 3,
	out: Annotated[
		Optional[Path],  # noqa: UP007
		typer.Option(help='Report directory, defaults to the results directory'),
	] = None,
	fingerprint: Annotated[Optional[str], typer.Option(help='Config fingerprint to embed')] = None,  # noqa: UP007
):
	'''
	Computes Hits@1, Hits@10, MRR, round shares and usage from a results file.
	'''
	report = build_report(load_results(results), dict(read_anchor_pairs(gold)), rounds, fingerprint)
	paths = write_report(report, out or results.parent)
	typer.echo(render_text(report))
	log_info(f'wrote {", ".join(str(p) for p in paths.values())}')


@app.command()
@exit_guard
def inspect(
	entity: Annotated[Optional[int], typer.Argument(help='KG1 entity id')] = None,  # noqa: UP007
	config: ConfigOption = None,
	k: Annotated[int, typer.Option(min=1, help='CSLS candidates to list')] = 10,
	synthetic: Annotated[
		Optional[Path],  # noqa: UP007
		typer.Option(help='Write a synthetic KG pair in the benchmark layout to this directory instead'),
	] = None,
	n_entities: Annotated[int, typer.Option(min=2)] = 100,
	seed: Annotated[int, typer.Option()] = 0,
):
	'''
	Shows how the pipeline sees one KG1 entity, or writes a synthetic dataset.
	'''
	if synthetic is not None:
		params = SyntheticConfig(n_entities=n_entities, seed=seed)
		kg1, kg2, anchors = synthetic_pair(**params.model_dump())
		serialize_kg(kg1, synthetic, '1')
		serialize_kg(kg2, synthetic, '2')
		write_anchors(anchors.pairs, synthetic / 'ref_ent_ids')
		typer.echo(f'wrote a synthetic pair of {n_entities} entities to {synthetic}')
		return

	if entity is None:
		raise typer.BadParameter('an entity id is needed unless --synthetic is given')

	run_config = get_config(config)
	dataset = load_dataset(run_config.dataset)
	kg1, kg2 = dataset.kg1, dataset.kg2
	if entity not in kg1.entities:
		raise typer.BadParameter(f'entity {entity} is not in {kg1.name}')
	codec = PromptCodec(cap=run_config.prompt.cap, ablations=frozenset(run_config.align.ablations))

	typer.echo(render_card(codec.card(kg1, entity), codec.code))
	typer.echo(f'neighbours: {[kg1.entities[n] for n in neighbors(kg1, entity)]}')
	typer.echo(f'relations: {relations_of(kg1, entity)}')
	typer.echo(f'time info: {time_info(kg1, entity)}')

	out = Path(run_config.output_dir)
	try:
		h1, h2 = load_checkpoints(out, dataset)
	except FileNotFoundError:
		typer.echo('no embedding checkpoints yet, run preprocess for CSLS candidates')
		return

	for rank, (cand, score) in enumerate(CslsIndex(h1, h2, run_config.features.csls).topk(entity, k), start=1):
		typer.echo(f'{rank:>3}  {cand:>8}  {score:+.4f}  {kg2.entities[cand]}')
