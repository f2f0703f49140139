import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from mahnn.app_settings import MAHNN_THREADS
from mahnn.constants import MODE_TRAIN, SPLIT_CV
from mahnn.data import make_splits
from mahnn.embeddings import (
    build_vocabulary,
    load_word2vec_text,
    max_sequence_length,
)
from mahnn.exceptions import ConfigError
from mahnn.network import MahNN
from mahnn.tensor import Tape, precision
from mahnn.utils.optimizers import build_optimizer


logger = logging.getLogger(__name__)

EVALUATION_BATCH_SIZE = 64


@dataclass
class TrainResult:
    model: MahNN
    history: list = field(default_factory=list)
    best_dev_accuracy: float = None
    best_epoch: int = None
    matched_embeddings: int = None
    rng_state: dict = None


@dataclass
class CrossValidationResult:
    folds: list = field(default_factory=list)
    assignment: list = field(default_factory=list)

    @property
    def accuracies(self):
        return [fold['accuracy'] for fold in self.folds]

    @property
    def mean(self):
        return float(np.mean(self.accuracies))

    @property
    def std(self):
        return float(np.std(self.accuracies))

    def to_dict(self):
        return {
            'folds': self.folds,
            'mean': self.mean,
            'std': self.std,
        }


def _labels(corpus):
    return np.array([example.label for example in corpus], dtype=np.int64)


def _token_lists(corpus):
    return [example.tokens for example in corpus]


def predict_arrays(model, ids, masks, threads=None,
                   batch_size=EVALUATION_BATCH_SIZE):
    """Infer-mode predictions, batches are scored on a thread pool"""
    chunks = [
        slice(start, start + batch_size)
        for start in range(0, len(ids), batch_size)
    ]
    if not chunks:
        return np.zeros(0, dtype=np.int64)

    workers = max(1, min(threads or MAHNN_THREADS, len(chunks)))

    def score(chunk):
        return model.predict(ids[chunk], masks[chunk])

    if workers == 1:
        predictions = [score(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            predictions = list(pool.map(score, chunks))

    return np.concatenate(predictions)


def evaluate(model, corpus, threads=None):
    """Fraction of examples whose argmax prediction is the true label"""
    if len(corpus) == 0:
        return 0.0
    ids, masks = model.encode(_token_lists(corpus))
    predictions = predict_arrays(model, ids, masks, threads=threads)
    return float(np.mean(predictions == _labels(corpus)))


class Trainer:
    """Runs the epoch loop for one model"""

    def __init__(self, model, config, metrics_path=None, on_epoch=None):
        self.model = model
        self.config = config
        # separate stream from the one that initialized the parameters
        self.rng = np.random.default_rng([config.seed, 1])
        self.params = model.named_parameters(trainable_only=True)
        self.optimizer = build_optimizer(
            config.optimizer, self.params, config.learning_rate
        )
        self.metrics_path = metrics_path
        self.on_epoch = on_epoch
        self.history = []
        self.best_state = None
        self.best_dev_accuracy = None
        self.best_epoch = None

    def _batches(self, size):
        order = self.rng.permutation(size)
        for start in range(0, size, self.config.batch_size):
            yield order[start:start + self.config.batch_size]

    def train_step(self, ids, masks, labels):
        """One optimizer update, returns the batch loss"""
        with Tape() as tape:
            value, _ = self.model.loss(
                ids, masks, labels, mode=MODE_TRAIN, rng=self.rng
            )
        gradients = tape.backward(value)

        grads = {
            name: gradients[tensor]
            for name, tensor in self.params.items()
            if tensor in gradients
        }
        self.optimizer.step(grads)
        return value.item()

    def _write_metrics(self, record):
        if self.metrics_path is None:
            return
        with open(self.metrics_path, 'a', encoding='utf-8') as handle:
            handle.write(json.dumps(record, sort_keys=True) + '\n')

    def _track_best(self, record):
        """Returns ``True`` once the dev accuracy stopped improving"""
        accuracy = record['dev_accuracy']
        if accuracy is None:
            return False

        if self.best_dev_accuracy is None or accuracy > self.best_dev_accuracy:
            self.best_dev_accuracy = accuracy
            self.best_epoch = record['epoch']
            self.best_state = self.model.state()
            return False

        return record['epoch'] - self.best_epoch >= self.config.patience

    def fit(self, train_corpus, dev_corpus=None):
        if len(train_corpus) == 0:
            raise ConfigError('the training set is empty')

        ids, masks = self.model.encode(_token_lists(train_corpus))
        labels = _labels(train_corpus)

        logger.info(
            'Training %s on %s examples for at most %s epochs',
            self.config.variant, len(labels), self.config.epochs
        )

        for epoch in range(1, self.config.epochs + 1):
            started = time.monotonic()
            total = 0.0

            for batch in self._batches(len(labels)):
                batch_loss = self.train_step(
                    ids[batch], masks[batch], labels[batch]
                )
                total += batch_loss * len(batch)

            train_predictions = predict_arrays(self.model, ids, masks)
            record = {
                'epoch': epoch,
                'loss': total / len(labels),
                'train_accuracy': float(
                    np.mean(train_predictions == labels)
                ),
                'dev_accuracy': (
                    evaluate(self.model, dev_corpus)
                    if dev_corpus is not None and len(dev_corpus) else None
                ),
            }
            self.history.append(record)
            self._write_metrics(record)

            logger.info(
                'Epoch %s: loss %.6f, train accuracy %.4f, '
                'dev accuracy %s (%.1fs)',
                epoch, record['loss'], record['train_accuracy'],
                record['dev_accuracy'], time.monotonic() - started
            )

            if self.on_epoch is not None:
                self.on_epoch(record)

            if self._track_best(record):
                logger.info(
                    'Early stopping after epoch %s, best dev accuracy %s '
                    'at epoch %s',
                    epoch, self.best_dev_accuracy, self.best_epoch
                )
                break

        if self.best_state is not None:
            self.model.load_state(self.best_state)

        return TrainResult(
            model=self.model,
            history=self.history,
            best_dev_accuracy=self.best_dev_accuracy,
            best_epoch=self.best_epoch,
            rng_state=self.rng.bit_generator.state,
        )


def build_model(config, train_corpus):
    """Vocabulary, optional pretrained vectors and a fresh ``MahNN``"""
    token_lists = _token_lists(train_corpus)
    vocabulary = build_vocabulary(token_lists)
    length = config.max_length or max_sequence_length(token_lists)

    embeddings, matched = None, None
    if config.embeddings_path:
        embeddings, matched = load_word2vec_text(
            config.embeddings_path, vocabulary, config.embedding_dim,
            rare_word_threshold=config.rare_word_threshold,
        )

    model = MahNN(
        config, vocabulary,
        num_classes=train_corpus.num_classes,
        sequence_length=length,
        embeddings=embeddings,
        class_names=train_corpus.class_names,
    )
    return model, matched


def split_dev(corpus, fraction, seed):
    """Seeded ``fraction`` slice of ``corpus`` held out for early stopping"""
    size = int(round(len(corpus) * fraction))
    if size < 1 or size >= len(corpus):
        return corpus, None

    order = np.random.default_rng([seed, 2]).permutation(len(corpus))
    dev = np.sort(order[:size])
    train = np.sort(order[size:])
    return corpus.subset(train), corpus.subset(dev)


def train(train_corpus, config, dev_corpus=None, metrics_path=None,
          on_epoch=None):
    """
    Builds and trains a model

    Without ``dev_corpus`` a seeded ``dev_fraction`` slice of the training
    data is held out for early stopping.
    """
    if len(train_corpus) == 0:
        raise ConfigError('the training set is empty')

    with precision(config.precision):
        if dev_corpus is None and config.dev_fraction > 0:
            train_corpus, dev_corpus = split_dev(
                train_corpus, config.dev_fraction, config.seed
            )

        model, matched = build_model(config, train_corpus)
        trainer = Trainer(
            model, config, metrics_path=metrics_path, on_epoch=on_epoch
        )
        result = trainer.fit(train_corpus, dev_corpus)

    result.matched_embeddings = matched
    return result


def kfold_cv(corpus, config, k=10, on_fold=None, on_epoch=None):
    """
    Trains one model per fold and scores it on the held out fold

    :param on_fold: optional callback receiving each fold record
    :param on_epoch: optional callback receiving ``(epoch_record, fold)``
    """
    plan = make_splits(corpus, mode=SPLIT_CV, k=k, seed=config.seed)
    result = CrossValidationResult(
        assignment=plan.fold_assignment(len(corpus)).tolist()
    )

    for fold, train_indices, test_indices in plan.iter_folds():
        fold_train = corpus.subset(train_indices)
        fold_test = corpus.subset(test_indices)

        epoch_callback = None
        if on_epoch is not None:
            def epoch_callback(record, fold=fold):
                on_epoch(record, fold)

        trained = train(fold_train, config, on_epoch=epoch_callback)
        with precision(config.precision):
            accuracy = evaluate(trained.model, fold_test)

        record = {
            'fold': fold,
            'train_size': len(fold_train),
            'test_size': len(fold_test),
            'accuracy': accuracy,
        }
        result.folds.append(record)

        logger.info(
            'Fold %s of %s: accuracy %.4f on %s examples',
            fold + 1, k, accuracy, len(fold_test)
        )
        if on_fold is not None:
            on_fold(record)

    logger.info(
        'Cross validation finished: mean accuracy %.4f (std %.4f)',
        result.mean, result.std
    )
    return result
