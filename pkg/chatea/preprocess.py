'''
Feature pre-processing: name, structure and time views for both KGs, fused
into one trained embedding per entity and written as checkpoints.
'''
import json
from dataclasses import dataclass
from logging import info as log_info
from logging import warning as log_warning
from pathlib import Path

import numpy as np

from .config_parser import DatasetConfig, FeaturesConfig, RunConfig, config_fingerprint
from .errors import AnchorError, ChatEAError, ReferentialIntegrityError
from .features import (
	EmbeddingMatrix,
	Time2VecParams,
	biased_walks,
	fuse_and_train,
	hashing_name_encoder,
	joint_graph,
	load_matrix,
	load_name_vectors,
	save_matrix,
	time_view,
	train_skipgram,
	whiten_pair,
)
from .kg import AnchorSet, KnowledgeGraph, load_anchors, load_kg, synthetic_pair, write_anchors
from .utils import file_digest

EMBEDDINGS = ('embeddings_1.bin', 'embeddings_2.bin')
ANCHOR_FILES = ('train_anchors', 'test_anchors')
MANIFEST = 'manifest.json'


@dataclass(frozen=True)
class Dataset:
	kg1: KnowledgeGraph
	kg2: KnowledgeGraph
	anchors: AnchorSet


def load_dataset(cfg: DatasetConfig) -> Dataset:
	if cfg.synthetic is not None:
		kg1, kg2, anchors = synthetic_pair(
			**cfg.synthetic.model_dump(), train_ratio=cfg.train_ratio, split_seed=cfg.split_seed,
		)
	else:
		directory = Path(cfg.directory or '.')
		kg1, kg2 = (
			load_kg(
				directory / f'triples_{n}',
				directory / f'ent_ids_{n}',
				cfg.temporal,
				directory / f'rel_ids_{n}',
				name=f'KG{n}',
			)
			for n in (1, 2)
		)
		anchors = load_anchors(directory / cfg.anchors_file, cfg.split_seed, cfg.train_ratio)

	for left, right in anchors.pairs:
		if left not in kg1.entities or right not in kg2.entities:
			raise AnchorError(f'anchor ({left}, {right}) names an entity missing from its KG')
	return Dataset(kg1, kg2, anchors)


def _name_vectors(kg: KnowledgeGraph, path: str | None, hash_dim: int) -> EmbeddingMatrix:
	if path is not None:
		return load_name_vectors(path, kg.entity_ids)
	log_info(f'no name vectors for {kg.name}, using the hashing name encoder ({hash_dim} dims)')
	return hashing_name_encoder(kg.entities, hash_dim)


def _structure_views(
	kg1: KnowledgeGraph,
	kg2: KnowledgeGraph,
	anchors: AnchorSet,
	cfg: FeaturesConfig,
	disable_progress: bool | None,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
	graph, nodes1, nodes2 = joint_graph(kg1, kg2, anchors.train)
	corpus = biased_walks(graph, cfg.walk)
	log_info(f'walk corpus: {len(corpus)} walks over {graph.number_of_nodes()} nodes')
	nodes = train_skipgram(corpus, sorted(graph.nodes), cfg.dims.structure, cfg.walk, disable_progress)

	def per_kg(kg: KnowledgeGraph, node_of: dict[int, int]) -> EmbeddingMatrix:
		return EmbeddingMatrix(kg.entity_ids, np.stack([nodes.row(node_of[e]) for e in kg.entity_ids]))

	return per_kg(kg1, nodes1), per_kg(kg2, nodes2)


def build_views(
	dataset: Dataset,
	cfg: FeaturesConfig,
	disable_progress: bool | None = None,
) -> tuple[dict[str, EmbeddingMatrix], dict[str, EmbeddingMatrix]]:
	'''
	The configured views of both KGs, keyed by view name in config order.
	'''
	kg1, kg2 = dataset.kg1, dataset.kg2
	views1: dict[str, EmbeddingMatrix] = {}
	views2: dict[str, EmbeddingMatrix] = {}

	for view in cfg.views:
		if view == 'name':
			paths = cfg.name_vectors or (None, None)
			views1['name'], views2['name'] = whiten_pair(
				_name_vectors(kg1, paths[0], cfg.name_hash_dim),
				_name_vectors(kg2, paths[1], cfg.name_hash_dim),
				cfg.dims.name,
			)
		elif view == 'structure':
			views1['structure'], views2['structure'] = _structure_views(
				kg1, kg2, dataset.anchors, cfg, disable_progress
			)
		else:
			params = Time2VecParams.init(cfg.dims.time // 2, cfg.time_seed)
			views1['time'] = time_view(kg1, params, cfg.time_epoch)
			views2['time'] = time_view(kg2, params, cfg.time_epoch)
		log_info(f'{view} view: {views1[view].dim} dims')

	return views1, views2


def embed(
	dataset: Dataset,
	cfg: FeaturesConfig,
	disable_progress: bool | None = None,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
	views1, views2 = build_views(dataset, cfg, disable_progress)
	out_dims = {view: getattr(cfg.dims, view) for view in cfg.views}
	h1, h2, _ = fuse_and_train(views1, views2, dataset.anchors.train, out_dims, cfg.train, disable_progress)
	return h1, h2


def run_preprocess(config: RunConfig, disable_progress: bool | None = None) -> Path:
	'''
	Writes both embedding checkpoints, the anchor split and a manifest with
	their sha256 digests to the output directory. On failure nothing written
	by this run is left behind.

	Returns
	-------
	Path
		The manifest
	'''
	out = Path(config.output_dir)
	out.mkdir(parents=True, exist_ok=True)
	written: list[Path] = []

	try:
		dataset = load_dataset(config.dataset)
		h1, h2 = embed(dataset, config.features, disable_progress)

		for path, matrix in zip((out / EMBEDDINGS[0], out / EMBEDDINGS[1]), (h1, h2), strict=True):
			written.append(path)
			save_matrix(matrix, path)
		for path, pairs in zip((out / ANCHOR_FILES[0], out / ANCHOR_FILES[1]),
			(dataset.anchors.train, dataset.anchors.test), strict=True):
			written.append(path)
			write_anchors(pairs, path)

		manifest = {
			'fingerprint': config_fingerprint(config),
			'files': {p.name: file_digest(p) for p in written},
			'entities': [len(dataset.kg1.entities), len(dataset.kg2.entities)],
			'views': list(config.features.views),
			'dim': h1.dim,
			'anchors': {'train': len(dataset.anchors.train), 'test': len(dataset.anchors.test)},
		}
		manifest_path = out / MANIFEST
		written.append(manifest_path)
		manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + '\n', encoding='utf-8')
	except BaseException:
		for path in written:
			path.unlink(missing_ok=True)
		raise

	log_info(f'preprocess done: {", ".join(p.name for p in written)} in {out}')
	return manifest_path


def load_checkpoints(
	directory: str | Path,
	dataset: Dataset | None = None,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
	'''
	Reads an embedding checkpoint pair. Any pair in the checkpoint format is
	accepted; when a manifest is present the digests must match it.
	'''
	directory = Path(directory)
	paths = [directory / name for name in EMBEDDINGS]
	for path in paths:
		if not path.exists():
			raise FileNotFoundError(f'embedding checkpoint {path} not found, run preprocess first')

	manifest_path = directory / MANIFEST
	if manifest_path.exists():
		files = json.loads(manifest_path.read_text(encoding='utf-8')).get('files', {})
		for path in paths:
			if path.name in files and files[path.name] != file_digest(path):
				raise ChatEAError(f'{path} does not match the digest in {manifest_path}')
	else:
		log_warning(f'no {MANIFEST} in {directory}, checkpoint digests are not verified')

	h1, h2 = load_matrix(paths[0]), load_matrix(paths[1])
	if dataset is not None:
		if set(h1.ids) != set(dataset.kg1.entity_ids) or set(h2.ids) != set(dataset.kg2.entity_ids):
			raise ReferentialIntegrityError(f'checkpoints in {directory} do not cover the dataset entities')
	return h1, h2
