from .csls import CandidateList, CslsConfig, CslsIndex, csls_topk
from .fusion import FusionModel, TrainConfig, fuse_and_train, margin_loss_and_grad
from .matrix import EmbeddingMatrix, concat, load_matrix, load_name_vectors, load_text_vectors, save_matrix
from .names import hashing_name_encoder
from .noise import inject_noise, noise_dims
from .skipgram import train_skipgram
from .time2vec import Time2VecParams, entity_time_scalars, time2vec, time_view
from .walks import WalkConfig, biased_walks, joint_graph, kg_graph
from .whitening import whiten, whiten_pair

__all__ = [
	'CandidateList',
	'CslsConfig',
	'CslsIndex',
	'EmbeddingMatrix',
	'FusionModel',
	'Time2VecParams',
	'TrainConfig',
	'WalkConfig',
	'biased_walks',
	'concat',
	'csls_topk',
	'entity_time_scalars',
	'fuse_and_train',
	'hashing_name_encoder',
	'inject_noise',
	'joint_graph',
	'kg_graph',
	'load_matrix',
	'load_name_vectors',
	'load_text_vectors',
	'margin_loss_and_grad',
	'noise_dims',
	'save_matrix',
	'time2vec',
	'time_view',
	'train_skipgram',
	'whiten',
	'whiten_pair',
]
