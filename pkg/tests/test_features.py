import networkx as nx
import numpy as np
import pytest

from chatea.errors import ChatEAError, ReferentialIntegrityError, WhiteningError
from chatea.features import (
	EmbeddingMatrix,
	Time2VecParams,
	WalkConfig,
	biased_walks,
	concat,
	entity_time_scalars,
	hashing_name_encoder,
	inject_noise,
	joint_graph,
	load_matrix,
	load_name_vectors,
	noise_dims,
	save_matrix,
	time2vec,
	time_view,
	train_skipgram,
	whiten,
	whiten_pair,
)
from chatea.features.names import encode_name, normalize_name
from chatea.features.walks import transition_weights
from chatea.features.whitening import whitening_transform


def _matrix(n: int = 6, dim: int = 4, seed: int = 0) -> EmbeddingMatrix:
	rng = np.random.default_rng(seed)
	return EmbeddingMatrix(tuple(range(100, 100 + n)), rng.normal(size=(n, dim)))


def test_matrix_rejects_bad_shape_and_nan():
	with pytest.raises(ValueError):
		EmbeddingMatrix((1, 2), np.zeros((3, 2)))
	with pytest.raises(ValueError):
		EmbeddingMatrix((1,), np.array([[np.nan, 0.0]]))


def test_matrix_save_load(tmp_path):
	matrix = _matrix()
	save_matrix(matrix, tmp_path / 'm.bin')
	loaded = load_matrix(tmp_path / 'm.bin')

	assert loaded.ids == matrix.ids
	np.testing.assert_array_equal(loaded.rows, matrix.rows)
	assert loaded.row(102).tolist() == matrix.rows[2].tolist()


def test_load_matrix_rejects_foreign_and_truncated_files(tmp_path):
	(tmp_path / 'foreign.bin').write_bytes(b'XXXX' + bytes(12))
	with pytest.raises(ChatEAError, match='not an embedding file'):
		load_matrix(tmp_path / 'foreign.bin')

	save_matrix(_matrix(), tmp_path / 'm.bin')
	data = (tmp_path / 'm.bin').read_bytes()
	(tmp_path / 'short.bin').write_bytes(data[:-8])
	with pytest.raises(ChatEAError, match='expected'):
		load_matrix(tmp_path / 'short.bin')


def test_concat_requires_shared_ids():
	a = _matrix(dim=2)
	b = _matrix(dim=3, seed=1)
	assert concat(a, b).dim == 5
	with pytest.raises(ValueError):
		concat(a, EmbeddingMatrix((1, 2), np.zeros((2, 2))))


def test_name_vectors_text_and_binary(tmp_path):
	(tmp_path / 'vec.txt').write_text('2\t0.5 1.5\n1\t1 2\n', encoding='utf-8')
	text = load_name_vectors(tmp_path / 'vec.txt', (1, 2))
	assert text.rows.tolist() == [[1.0, 2.0], [0.5, 1.5]]

	save_matrix(EmbeddingMatrix((2, 1), text.rows[::-1]), tmp_path / 'vec.bin')
	binary = load_name_vectors(tmp_path / 'vec.bin', (1, 2))
	np.testing.assert_array_equal(binary.rows, text.rows)

	with pytest.raises(ReferentialIntegrityError):
		load_name_vectors(tmp_path / 'vec.txt', (1, 2, 3))


def test_hashing_encoder():
	assert normalize_name('Monarchy_of_the  United_Kingdom') == 'monarchy of the united kingdom'
	np.testing.assert_array_equal(encode_name('British_Raj', 32), encode_name('british raj', 32))

	matrix = hashing_name_encoder({3: 'Ireland', 1: 'British Monarch', 2: ''}, dim=32)
	assert matrix.ids == (1, 2, 3)
	assert np.linalg.norm(matrix.row(1)) == pytest.approx(1.0)
	assert np.linalg.norm(matrix.row(2)) == pytest.approx(1.0)


def test_similar_names_are_closer():
	names = ('Monarchy of the United Kingdom', 'Monarchy_of_the_United_Kingdon', 'Lithuania')
	a, b, c = (encode_name(n, 128) for n in names)
	assert a @ b > a @ c


def test_whitening_gives_identity_covariance():
	rng = np.random.default_rng(0)
	x = rng.normal(size=(200, 10)) @ rng.normal(size=(10, 10)) + 3.0
	mu, w = whitening_transform(x, keep_dim=6)
	y = (x - mu) @ w

	assert y.shape == (200, 6)
	np.testing.assert_allclose(np.cov(y, rowvar=False), np.eye(6), atol=1e-8)


@pytest.mark.parametrize(('n', 'dim', 'keep'), [(200, 768, 64), (4 * 768, 768, 64), (40, 10, 10)])
def test_whitened_covariance_is_the_identity(n, dim, keep):
	rng = np.random.default_rng(dim)
	x = rng.normal(size=(n, dim)) * rng.uniform(0.5, 3.0, size=dim) + 1.0
	mu, w = whitening_transform(x, keep_dim=keep)

	cov = np.cov((x - mu) @ w, rowvar=False)
	assert np.abs(cov - np.eye(keep)).max() <= 1e-6


def test_whitening_rank_and_size_checks(caplog):
	rng = np.random.default_rng(1)
	x = rng.normal(size=(50, 3)) @ rng.normal(size=(3, 8))
	with caplog.at_level('WARNING'):
		assert whitening_transform(x, keep_dim=3)[1].shape == (8, 3)
	assert 'covariance has rank 3 < 8' in caplog.text

	with pytest.raises(WhiteningError, match='rank'):
		whitening_transform(x, keep_dim=4)
	with pytest.raises(WhiteningError):
		whitening_transform(x[:2], keep_dim=3)


def test_whiten_pair_shares_one_transform():
	left, right = _matrix(n=30, dim=5), _matrix(n=30, dim=5, seed=2)
	w_left, w_right = whiten_pair(left, right, keep_dim=3)
	stacked = np.vstack([w_left.rows, w_right.rows])

	np.testing.assert_allclose(np.cov(stacked, rowvar=False), np.eye(3), atol=1e-8)
	assert whiten(left, 3).dim == 3


def test_time2vec_components():
	params = Time2VecParams.init(8, seed=0)
	assert params.omega[0] == pytest.approx(0.01)
	assert params.phi[0] == 0.0

	np.testing.assert_array_equal(time2vec(None, params), np.zeros(8))
	vec = time2vec(11.0, params)
	assert vec[0] == pytest.approx(0.11)
	assert np.all(np.abs(vec[1:]) <= 1.0)
	assert time2vec(22.0, params)[0] == pytest.approx(2 * vec[0])


def test_time2vec_by_hand():
	vec = time2vec(1.0, Time2VecParams(omega=[1.0, np.pi], phi=[0.0, 0.0]))
	np.testing.assert_allclose(vec, [1.0, 0.0], rtol=0, atol=1e-12)


def test_time2vec_periodic_components_repeat():
	params = Time2VecParams.init(6, seed=3)
	periods = 2 * np.pi / params.omega[1:]
	for tau in (-12.5, 0.0, 3.25):
		base = time2vec(tau, params)
		for i, period in enumerate(periods, start=1):
			assert time2vec(tau + period, params)[i] == pytest.approx(base[i], abs=1e-9)
		assert time2vec(tau + periods[0], params)[0] == pytest.approx(base[0] + 0.01 * periods[0])


def test_time_view(case_pair):
	kg1, kg2 = case_pair
	params = Time2VecParams.init(4, seed=0)

	assert entity_time_scalars(kg1, 7497) == ('1999-04', '2011-05')
	view = time_view(kg1, params)
	assert view.dim == 8
	assert view.ids == kg1.entity_ids
	np.testing.assert_allclose(view.row(7497)[:4], time2vec(-1 + 3 / 12, params))

	np.testing.assert_array_equal(time_view(kg2, params).rows, 0.0)


def _path_graph() -> nx.Graph:
	graph = nx.Graph()
	graph.add_edges_from([(0, 1), (1, 2), (1, 3), (2, 3), (3, 4)])
	return graph


def test_transition_weights():
	graph = _path_graph()
	candidates, weights = transition_weights(graph, prev=None, cur=1, p=2.0, q=0.5)
	assert candidates == [0, 2, 3]
	assert weights.tolist() == [1.0, 1.0, 1.0]

	candidates, weights = transition_weights(graph, prev=2, cur=3, p=2.0, q=0.5)
	assert candidates == [1, 2, 4]
	assert weights.tolist() == [1.0, 0.5, 2.0]


def test_walk_transitions_follow_the_weights():
	graph = _path_graph()
	cfg = WalkConfig(walks_per_node=200, walk_length=100, p=2.0, q=0.5, seed=11)
	counts = {1: 0, 2: 0, 4: 0}
	for walk in biased_walks(graph, cfg):
		for prev, cur, nxt in zip(walk, walk[1:], walk[2:]):
			if (prev, cur) == (2, 3):
				counts[nxt] += 1

	total = sum(counts.values())
	assert total > 2000
	_, weights = transition_weights(graph, prev=2, cur=3, p=2.0, q=0.5)
	for node, prob in zip((1, 2, 4), weights / weights.sum()):
		sigma = np.sqrt(total * prob * (1 - prob))
		assert abs(counts[node] - total * prob) <= 3 * sigma


def test_walks_avoid_distant_nodes_with_a_large_inout_bias():
	graph = nx.path_graph(3)
	walks = biased_walks(graph, WalkConfig(walks_per_node=20, walk_length=30, q=1e9, seed=0))
	for walk in walks:
		if walk[0] == 0:
			assert set(walk) == {0, 1}


def test_biased_walks_are_seeded():
	cfg = WalkConfig(walks_per_node=3, walk_length=6, p=0.5, q=2.0, seed=4)
	first = biased_walks(_path_graph(), cfg)
	assert first == biased_walks(_path_graph(), cfg)
	assert len(first) == 15
	assert all(len(walk) == 6 for walk in first)

	graph = _path_graph()
	for walk in first:
		assert all(graph.has_edge(a, b) for a, b in zip(walk, walk[1:]))


def test_walks_stop_at_isolated_nodes():
	graph = _path_graph()
	graph.add_node(9)
	walks = biased_walks(graph, WalkConfig(walks_per_node=1, walk_length=4))
	assert [9] in walks


def test_joint_graph_merges_train_anchors(small_synthetic):
	kg1, kg2, anchors = small_synthetic
	graph, nodes1, nodes2 = joint_graph(kg1, kg2, anchors.train)

	assert graph.number_of_nodes() == len(kg1) + len(kg2) - len(anchors.train)
	for left, right in anchors.train:
		assert nodes1[left] == nodes2[right]
	left, right = anchors.test[0]
	assert nodes1[left] != nodes2[right]


def test_skipgram_shape_and_absent_rows():
	cfg = WalkConfig(walks_per_node=5, walk_length=8, window=2, epochs=2, seed=0)
	graph = _path_graph()
	corpus = biased_walks(graph, cfg)
	emb = train_skipgram(corpus, [0, 1, 2, 3, 4, 7], dim=8, cfg=cfg, disable_progress=True)

	assert emb.ids == (0, 1, 2, 3, 4, 7)
	assert emb.dim == 8
	np.testing.assert_array_equal(emb.row(7), np.zeros(8))
	assert np.linalg.norm(emb.row(1)) > 0

	again = train_skipgram(corpus, [0, 1, 2, 3, 4, 7], dim=8, cfg=cfg, disable_progress=True)
	np.testing.assert_array_equal(emb.rows, again.rows)


def test_skipgram_separates_disconnected_cliques():
	graph = nx.disjoint_union(nx.complete_graph(5), nx.complete_graph(5))
	cfg = WalkConfig(walks_per_node=20, walk_length=20, window=3, epochs=5, learning_rate=0.05, seed=0)
	emb = train_skipgram(biased_walks(graph, cfg), list(range(10)), dim=16, cfg=cfg, disable_progress=True)

	unit = emb.rows / np.linalg.norm(emb.rows, axis=1, keepdims=True)
	cos = unit @ unit.T
	same = np.equal.outer(np.arange(10) < 5, np.arange(10) < 5)
	off_diagonal = ~np.eye(10, dtype=bool)
	assert cos[same & off_diagonal].mean() > cos[~same].mean()


def test_skipgram_rejects_empty_corpus():
	with pytest.raises(ValueError):
		train_skipgram([], [1], dim=4, cfg=WalkConfig())


@pytest.mark.parametrize(('ratio', 'count'), [(0.0, 0), (0.25, 16), (0.5, 32), (1.0, 64)])
def test_noise_dims_count(ratio, count):
	dims = noise_dims(64, ratio, seed=0)
	assert len(dims) == count
	assert len(set(dims.tolist())) == count
	assert dims.tolist() == sorted(dims.tolist())


def test_noise_ratio_bounds():
	with pytest.raises(ValueError):
		noise_dims(8, 1.5, seed=0)
	with pytest.raises(ValueError):
		noise_dims(8, -0.1, seed=0)


def test_inject_noise():
	emb = _matrix(n=20, dim=10)
	np.testing.assert_array_equal(inject_noise(emb, 0.0, seed=0).rows, emb.rows)

	noisy = inject_noise(emb, 0.3, seed=5)
	dims = noise_dims(10, 0.3, seed=5)
	untouched = np.setdiff1d(np.arange(10), dims)

	np.testing.assert_array_equal(noisy.rows[:, untouched], emb.rows[:, untouched])
	assert not np.array_equal(noisy.rows[:, dims], emb.rows[:, dims])
	assert np.all(noisy.rows[:, dims] >= emb.rows[:, dims].min(axis=0))
	assert np.all(noisy.rows[:, dims] <= emb.rows[:, dims].max(axis=0))
	np.testing.assert_array_equal(inject_noise(emb, 0.3, seed=5).rows, noisy.rows)
