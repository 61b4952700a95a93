"""Word embeddings as dense vectors or indefinite symmetric matrices.

Train with a shared skip-gram negative-sampling objective (the matrix kind
scores pairs with the trace inner product), decompose matrix words into
signed eigenstates, and solve analogies with a tunable mixed score.
"""

from .algebra import (
    EigenDecomposition,
    ZeroNormError,
    dense_cosine,
    dense_inner,
    dense_norm,
    eigendecompose,
    inner_multipliers,
    pack,
    packed_cosine,
    packed_distance,
    packed_inner,
    packed_length,
    packed_norm,
    pure_state_projector,
    unpack,
)
from .analogy import (
    DEFAULT_ALPHA_GRID,
    AnalogyDataset,
    AnalogyQuestion,
    AnalogyReport,
    DatasetFormatError,
    OutOfVocabularyError,
    alpha_sweep,
    evaluate,
    load_bats,
    load_google,
    score_matrix_mixed,
    score_mixed,
    score_vector_mixed,
    solve,
    sweep_table_text,
    write_report_tsv,
)
from .backend import available_backends, default_backend, get_kernel
from .corpus import (
    EmptyCorpusError,
    NegativeSampler,
    TrainingPair,
    Vocabulary,
    build_vocab,
    build_vocab_from_file,
    keep_probability,
    training_pairs,
)
from .modelio import ModelFormatError, load_model, save_model
from .neighbors import UnsupportedKindError, eigen_neighbors, nearest
from .trainer import (
    Model,
    TrainerConfig,
    epoch_mean_loss,
    init_tables,
    pair_loss,
    sgd_step,
    sigmoid,
    train,
)

__version__ = "0.1.0"
