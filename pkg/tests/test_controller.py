import json

import pytest
import typer
from typer.testing import CliRunner

from chatea import app
from chatea.config_parser import config_fingerprint, get_config, parse_config
from chatea.errors import ConfigError
from chatea.eval import load_results
from chatea.preprocess import load_dataset
from chatea.prompts import Ablation
from chatea.utils import EXIT_RUNTIME_FAILURE, EXIT_USER_ERROR, exit_guard

runner = CliRunner()

SMALL_CONFIG = '''
dataset:
  {dataset}
  train_ratio: 0.3
features:
  dims:
    name: 16
    structure: 16
    time: 16
  name_hash_dim: 64
  walk:
    walks_per_node: 4
    walk_length: 10
    epochs: 2
  train:
    epochs: 5
    csls_k: 5
  csls:
    neighborhood_k: 5
align:
  schedule: [1, 5, 10]
  ablations: [{ablations}]
backend:
  oracle:
    noise:
      seed: 0
output_dir: {out}
'''


SYNTHETIC = 'synthetic: {n_entities: 40, seed: 1}'


def _write_config(tmp_path, name='config.yaml', out='out', dataset=SYNTHETIC, ablations=''):
	path = tmp_path / name
	path.write_text(SMALL_CONFIG.format(dataset=dataset, out=tmp_path / out, ablations=ablations), encoding='utf-8')
	return path


def _raw(**overrides) -> dict:
	return {'dataset': {'synthetic': {'n_entities': 10}}, 'backend': {'oracle': {}}, **overrides}


def test_parse_config_defaults():
	config = parse_config(_raw())
	assert config.backend == ('oracle', {})
	assert config.align.schedule == (1, 10, 20)
	assert config.features.views == ('name', 'structure', 'time')


def test_parse_config_picks_the_first_supported_backend():
	config = parse_config(_raw(backend={'llamacpp': {}, 'scripted': {'transcript': 't'}, 'oracle': {}}))
	assert config.backend == ('scripted', {'transcript': 't'})


@pytest.mark.parametrize('raw', [
	{'dataset': {'synthetic': {}}},
	_raw(backend={'unknown': {}}),
	_raw(retries=3),
	_raw(dataset={'directory': 'data', 'synthetic': {}}),
	_raw(align={'schedule': [10, 1]}),
	_raw(features={'dims': {'time': 7}}),
	_raw(align={'ablations': ['no-vibes']}),
	[],
])
def test_parse_config_errors(raw):
	with pytest.raises(ConfigError):
		parse_config(raw)


def test_no_two_stage_ablation_sets_a_single_round():
	config = parse_config(_raw(align={'schedule': [1, 10, 20], 'ablations': ['no-two-stage']}))
	assert config.align.ablations == (Ablation.NO_TWO_STAGE,)
	assert config.align.loop_config().rounds == (20,)


def test_synthetic_dataset_uses_the_split_seed():
	def dataset(**extra):
		return load_dataset(parse_config(_raw(dataset={'synthetic': {'n_entities': 30}, **extra})).dataset)

	default, reseeded = dataset(), dataset(split_seed=5)
	assert reseeded.kg2 == default.kg2
	assert reseeded.anchors.pairs == default.anchors.pairs
	assert reseeded.anchors.train != default.anchors.train


def test_get_config_from_the_environment(tmp_path, monkeypatch):
	path = _write_config(tmp_path)
	monkeypatch.setenv('CHATEA_CONFIG', str(path))
	assert get_config().dataset.synthetic.n_entities == 40

	with pytest.raises(ConfigError, match='could not load config'):
		get_config(str(tmp_path / 'missing.yaml'))


def test_fingerprint_is_stable(tmp_path):
	path = _write_config(tmp_path)
	first = config_fingerprint(get_config(str(path)))
	assert first == config_fingerprint(get_config(str(path)))
	assert len(first) == 64

	changed = _write_config(tmp_path, 'other.yaml', ablations='no-code')
	assert config_fingerprint(get_config(str(changed))) != first


def test_exit_guard_codes():
	@exit_guard
	def user_error():
		raise ConfigError('bad')

	@exit_guard
	def crash():
		raise RuntimeError('boom')

	for func, code in ((user_error, EXIT_USER_ERROR), (crash, EXIT_RUNTIME_FAILURE)):
		with pytest.raises(typer.Exit) as info:
			func()
		assert info.value.exit_code == code


def test_missing_config_exits_with_a_user_error(tmp_path):
	result = runner.invoke(app, ['align', '--config', str(tmp_path / 'missing.yaml')])
	assert result.exit_code == EXIT_USER_ERROR


def test_align_before_preprocess_is_a_user_error(tmp_path):
	result = runner.invoke(app, ['align', '--config', str(_write_config(tmp_path))])
	assert result.exit_code == EXIT_USER_ERROR
	assert not (tmp_path / 'out' / 'results.jsonl').exists()


def test_eval_rejects_a_bad_results_file(tmp_path):
	(tmp_path / 'results.jsonl').write_text('{"target": 1}\n', encoding='utf-8')
	(tmp_path / 'gold').write_text('1\t2\n', encoding='utf-8')
	result = runner.invoke(app, ['eval', str(tmp_path / 'results.jsonl'), str(tmp_path / 'gold')])
	assert result.exit_code == EXIT_USER_ERROR


def test_inspect_synthetic_dataset(tmp_path):
	data = tmp_path / 'data'
	result = runner.invoke(app, ['inspect', '--synthetic', str(data), '--n-entities', '20', '--seed', '2'])
	assert result.exit_code == 0, result.output
	for name in ('triples_1', 'ent_ids_1', 'rel_ids_1', 'triples_2', 'ent_ids_2', 'rel_ids_2', 'ref_ent_ids'):
		assert (data / name).exists()

	entity, name = (data / 'ent_ids_1').read_text(encoding='utf-8').splitlines()[0].split('\t')
	config = _write_config(tmp_path, dataset=f'directory: {data}')
	result = runner.invoke(app, ['inspect', entity, '--config', str(config)])
	assert result.exit_code == 0, result.output
	assert name in result.output
	assert 'no embedding checkpoints yet' in result.output

	result = runner.invoke(app, ['inspect', '99999', '--config', str(config)])
	assert result.exit_code == EXIT_USER_ERROR


@pytest.mark.slow
def test_preprocess_align_eval_replay(tmp_path):
	config = _write_config(tmp_path)
	out = tmp_path / 'out'

	result = runner.invoke(app, ['preprocess', '--config', str(config)])
	assert result.exit_code == 0, result.output
	manifest = json.loads((out / 'manifest.json').read_text(encoding='utf-8'))
	assert manifest['dim'] == 48
	assert manifest['anchors'] == {'train': 12, 'test': 28}

	result = runner.invoke(app, ['align', '--config', str(config)])
	assert result.exit_code == 0, result.output
	assert 'Hits@1' in result.output
	results = load_results(out / 'results.jsonl')
	assert len(results) == 28
	assert not any(r.failed for r in results)
	align_report = json.loads((out / 'report.json').read_text(encoding='utf-8'))

	report_dir = tmp_path / 'eval'
	result = runner.invoke(app, [
		'eval', str(out / 'results.jsonl'), str(out / 'test_anchors'), '--rounds', '3', '--out', str(report_dir),
	])
	assert result.exit_code == 0, result.output
	eval_report = json.loads((report_dir / 'report.json').read_text(encoding='utf-8'))
	for key in ('targets', 'hits1', 'hits10', 'mrr', 'rounds', 'avg_calls'):
		assert eval_report[key] == align_report[key]

	aligned = (out / 'results.jsonl').read_bytes()
	transcript = (out / 'transcript.jsonl').read_bytes()

	# replay over the same output directory, reading the transcript it rewrites
	result = runner.invoke(app, ['replay', str(out / 'transcript.jsonl'), '--config', str(config)])
	assert result.exit_code == 0, result.output
	assert (out / 'results.jsonl').read_bytes() == aligned
	assert (out / 'transcript.jsonl').read_bytes() == transcript
	replay_report = json.loads((out / 'report.json').read_text(encoding='utf-8'))
	# the replay config names the scripted backend, so only the fingerprint differs
	assert replay_report.pop('fingerprint') != align_report.pop('fingerprint')
	assert replay_report == align_report

	result = runner.invoke(app, ['align', '--config', str(config)])
	assert result.exit_code == 0, result.output
	assert (out / 'results.jsonl').read_bytes() == aligned
