import json

from mahnn.app_settings import MAHNN_FOLDS
from mahnn.data import make_splits
from mahnn.management.base import MahnnCommand
from mahnn.utils.files import write_atomic
from mahnn.utils.reporting import cv_table
from mahnn.utils.run_manifest import RunRecorder
from mahnn.utils.training import kfold_cv

RESULTS_FILE = 'cv_results.json'
TABLE_FILE = 'cv_results.txt'


class Command(MahnnCommand):
    help = 'k-fold cross validation of one configuration'

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        parser.add_argument('--data', required=True)
        parser.add_argument('--k', type=int, default=MAHNN_FOLDS)
        self.add_out_argument(parser)

    def run(self, **options):
        config = self.resolve_config(options)
        corpus, _ = self.load_data(options['data'])
        k = options['k']
        # rejects a bad k before anything is written
        make_splits(corpus, k=k, seed=config.seed)

        out_dir = self.out_dir(options)
        recorder = RunRecorder(
            'mahnn_cv', out_dir, config=config,
            inputs={'config': options.get('config'),
                    'data': options['data']},
        )

        try:
            result = kfold_cv(
                corpus, config, k=k,
                on_fold=recorder.add_fold,
                on_epoch=lambda record, fold: recorder.add_epoch(
                    record, fold=fold
                ),
            )
        except Exception as e:
            recorder.fail(e)
            raise

        results = dict(result.to_dict(), k=k, variant=config.variant,
                       assignment=result.assignment)
        table = cv_table(result)
        recorder.add_output(
            write_atomic(out_dir / RESULTS_FILE,
                         json.dumps(results, indent=2, sort_keys=True)),
            write_atomic(out_dir / TABLE_FILE, table),
        )
        recorder.finish(accuracy=result.mean, results=result.to_dict())

        self.stdout.write(table, ending='')
