import json

from mahnn.constants import SPLIT_FIXED_TEST, SPLIT_TEST
from mahnn.data import (
    corpus_statistics,
    make_splits,
    synthetic_keyword_corpus,
)
from mahnn.exceptions import ConfigError
from mahnn.management.base import MahnnCommand
from mahnn.tensor import precision
from mahnn.utils.checkpoint import save_checkpoint
from mahnn.utils.files import write_atomic
from mahnn.utils.run_manifest import RunRecorder
from mahnn.utils.training import evaluate, train

METRICS_FILE = 'metrics.jsonl'
CHECKPOINT_DIRECTORY = 'checkpoint'
LOAD_REPORT_FILE = 'load_report.json'


class Command(MahnnCommand):
    help = 'Trains a MahNN classifier and saves a checkpoint'

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        parser.add_argument('--data', help='label<TAB>text[<TAB>split] file')
        parser.add_argument(
            '--synthetic', type=int, metavar='N',
            help='train on N examples of the keyword corpus instead of --data'
        )
        self.add_out_argument(parser)

    def _corpus(self, options, seed):
        if options.get('synthetic'):
            if options.get('data'):
                raise ConfigError('--data and --synthetic are exclusive')
            corpus = synthetic_keyword_corpus(options['synthetic'], seed=seed)
            return corpus, None
        return self.load_data(options.get('data'))

    def run(self, **options):
        config = self.resolve_config(options)
        corpus, report = self._corpus(options, config.seed)

        train_corpus, dev_corpus, test_corpus = corpus, None, None
        if any(example.split == SPLIT_TEST for example in corpus):
            plan = make_splits(corpus, mode=SPLIT_FIXED_TEST)
            train_corpus = corpus.subset(plan.train)
            dev_corpus = corpus.subset(plan.dev) if plan.dev else None
            test_corpus = corpus.subset(plan.test)

        out_dir = self.out_dir(options)
        recorder = RunRecorder(
            'mahnn_train', out_dir, config=config,
            inputs={'config': options.get('config'),
                    'data': options.get('data')},
        )

        metrics_path = out_dir / METRICS_FILE
        if metrics_path.exists():
            metrics_path.unlink()

        try:
            result = train(
                train_corpus, config, dev_corpus=dev_corpus,
                metrics_path=metrics_path, on_epoch=recorder.add_epoch,
            )
            model = result.model
            with precision(config.precision):
                train_accuracy = evaluate(model, train_corpus)
                test_accuracy = (
                    evaluate(model, test_corpus)
                    if test_corpus is not None else None
                )

            written = save_checkpoint(
                model, out_dir / CHECKPOINT_DIRECTORY,
                rng_state=result.rng_state
            )
            statistics = corpus_statistics(
                corpus, model.vocabulary, result.matched_embeddings
            )
            load_report = {
                'statistics': statistics,
                'load': report.to_dict() if report is not None else None,
            }
            load_report_path = write_atomic(
                out_dir / LOAD_REPORT_FILE,
                json.dumps(load_report, indent=2, sort_keys=True)
            )
        except Exception as e:
            recorder.fail(e)
            raise

        recorder.add_output(metrics_path, load_report_path, *written)
        accuracy = test_accuracy if test_accuracy is not None \
            else train_accuracy
        recorder.finish(accuracy=accuracy, results={
            'train_accuracy': train_accuracy,
            'test_accuracy': test_accuracy,
            'best_dev_accuracy': result.best_dev_accuracy,
            'best_epoch': result.best_epoch,
            'epochs': len(result.history),
        })

        self.stdout.write(
            f'{config.variant}: train accuracy {train_accuracy:.4f}'
        )
        if test_accuracy is not None:
            self.stdout.write(f'test accuracy {test_accuracy:.4f}')
        self.stdout.write(self.style.SUCCESS(
            f'Checkpoint written to {out_dir / CHECKPOINT_DIRECTORY}'
        ))
