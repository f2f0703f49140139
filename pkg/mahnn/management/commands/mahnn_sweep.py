import json

from mahnn.app_settings import MAHNN_FOLDS
from mahnn.constants import SWEEP_PARAMETERS
from mahnn.data import make_splits
from mahnn.exceptions import ConfigError
from mahnn.management.base import MahnnCommand
from mahnn.utils.files import write_atomic
from mahnn.utils.reporting import sweep_table
from mahnn.utils.run_manifest import RunRecorder
from mahnn.utils.training import kfold_cv

RESULTS_FILE = 'sweep_results.json'
TABLE_FILE = 'sweep_results.txt'


class Command(MahnnCommand):
    help = (
        'Cross validated accuracy for each value of one hyper-parameter, '
        'e.g. --parameter filter_sizes --values 3,4,5 2,3,4'
    )

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        parser.add_argument('--data', required=True)
        parser.add_argument(
            '--parameter', required=True, choices=SWEEP_PARAMETERS
        )
        parser.add_argument('--values', required=True, nargs='+')
        parser.add_argument('--k', type=int, default=MAHNN_FOLDS)
        self.add_out_argument(parser)

    def _configs(self, options):
        """Every point of the sweep, all validated before any training"""
        configs, errors = [], []
        for value in options['values']:
            try:
                configs.append(self.resolve_config(
                    options, **{options['parameter']: value}
                ))
            except ConfigError as e:
                errors += [f'{value}: {message}' for message in e.messages]

        if errors:
            raise ConfigError(errors)
        return configs

    def run(self, **options):
        parameter = options['parameter']
        configs = self._configs(options)
        corpus, _ = self.load_data(options['data'])
        k = options['k']
        for config in configs:
            make_splits(corpus, k=k, seed=config.seed)

        out_dir = self.out_dir(options)
        recorder = RunRecorder(
            'mahnn_sweep', out_dir, config=configs[0],
            inputs={'config': options.get('config'),
                    'data': options['data']},
        )

        rows = []
        try:
            for config in configs:
                result = kfold_cv(corpus, config, k=k)
                rows.append({
                    parameter: getattr(config, parameter),
                    'variant': config.variant,
                    'mean': result.mean,
                    'std': result.std,
                    'folds': result.accuracies,
                })
        except Exception as e:
            recorder.fail(e)
            raise

        for row in rows:
            if isinstance(row[parameter], tuple):
                row[parameter] = list(row[parameter])

        results = {'parameter': parameter, 'k': k, 'rows': rows}
        table = sweep_table(parameter, rows)
        recorder.add_output(
            write_atomic(out_dir / RESULTS_FILE,
                         json.dumps(results, indent=2, sort_keys=True)),
            write_atomic(out_dir / TABLE_FILE, table),
        )
        recorder.finish(
            accuracy=max(row['mean'] for row in rows), results=results
        )
        self.stdout.write(table, ending='')
