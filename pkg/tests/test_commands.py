import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from mahnn.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_DATA_ERROR,
    EXIT_VERIFICATION_FAILURE,
    RUN_COMPLETED,
)
from mahnn.data import synthetic_keyword_corpus
from mahnn.models import TrainingRun

SMALL_CONFIG = {
    'hidden_size': 4,
    'embedding_dim': 5,
    'channels': 2,
    'filter_sizes': [2, 3],
    'filter_maps': 3,
    'dropout': 0.0,
    'batch_size': 10,
    'epochs': 2,
    'dev_fraction': 0.0,
    'learning_rate': 0.01,
}


class CommandTestCase(TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)
        self.config = self.root / 'config.json'
        self.config.write_text(json.dumps(SMALL_CONFIG))

    def tearDown(self):
        self.directory.cleanup()

    def call(self, name, *args, **options):
        stdout = StringIO()
        call_command(name, *args, stdout=stdout, **options)
        return stdout.getvalue()

    def write_data(self, name='data.tsv', size=20, seed=9, split=None):
        lines = []
        for example in synthetic_keyword_corpus(size, seed=seed):
            columns = [str(example.label), ' '.join(example.tokens)]
            if split:
                columns.append(split)
            lines.append('\t'.join(columns) + '\n')
        path = self.root / name
        path.write_text(''.join(lines))
        return path

    def manifest(self, out):
        return json.loads((Path(out) / 'manifest.json').read_text())


class TrainCommandTest(CommandTestCase):

    def test_invalid_config_exits_before_writing(self):
        self.config.write_text(json.dumps({'hidden_size': 0, 'unknown': 1}))
        out = self.root / 'run'

        with self.assertRaises(CommandError) as context:
            self.call('mahnn_train', config=str(self.config), synthetic=10,
                      out=str(out))

        self.assertEqual(context.exception.returncode, EXIT_CONFIG_ERROR)
        self.assertIn('hidden_size', str(context.exception))
        self.assertFalse(out.exists())
        self.assertFalse(TrainingRun.objects.exists())

    def test_missing_data_file(self):
        with self.assertRaises(CommandError) as context:
            self.call('mahnn_train', config=str(self.config),
                      data=str(self.root / 'missing.tsv'),
                      out=str(self.root / 'run'))

        self.assertEqual(context.exception.returncode, EXIT_DATA_ERROR)

    def test_malformed_data_file(self):
        path = self.root / 'bad.tsv'
        path.write_text('1\tfine\n0 no tab\n')

        with self.assertRaises(CommandError) as context:
            self.call('mahnn_train', config=str(self.config), data=str(path),
                      out=str(self.root / 'run'))

        self.assertEqual(context.exception.returncode, EXIT_DATA_ERROR)
        self.assertIn('line 2', str(context.exception))

    def test_data_and_synthetic_are_exclusive(self):
        with self.assertRaises(CommandError) as context:
            self.call('mahnn_train', config=str(self.config), synthetic=10,
                      data=str(self.write_data()),
                      out=str(self.root / 'run'))

        self.assertEqual(context.exception.returncode, EXIT_CONFIG_ERROR)

    def test_rv_flag_and_channel_override(self):
        out = self.root / 'rv'

        self.call('mahnn_train', config=str(self.config), synthetic=20,
                  rv=True, channels=3, out=str(out))

        manifest = self.manifest(out)
        self.assertEqual(manifest['variant'], 'MahNN-rv')
        self.assertEqual(manifest['config']['channels'], 3)


class TrainEvaluateAttentionTest(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.out = self.root / 'train'
        self.output = self.call(
            'mahnn_train', config=str(self.config), synthetic=40, seed=2,
            out=str(self.out)
        )
        self.checkpoint = self.out / 'checkpoint'

    def test_train_outputs(self):
        self.assertIn('MahNN-2: train accuracy', self.output)
        self.assertIn('Checkpoint written to', self.output)

        metrics = (self.out / 'metrics.jsonl').read_text().splitlines()
        self.assertEqual(
            [json.loads(line)['epoch'] for line in metrics], [1, 2]
        )
        for name in ('config.json', 'vocabulary.txt', 'parameters.bin',
                     'parameters.json', 'rng.json'):
            self.assertTrue((self.checkpoint / name).is_file())

        manifest = self.manifest(self.out)
        self.assertEqual(manifest['command'], 'mahnn_train')
        self.assertEqual(manifest['seed'], 2)
        self.assertIn(str(self.out / 'metrics.jsonl'), manifest['checksums'])
        load_report = json.loads((self.out / 'load_report.json').read_text())
        self.assertEqual(load_report['statistics']['N'], 40)

        run = TrainingRun.objects.get()
        self.assertEqual(run.status, RUN_COMPLETED)
        self.assertEqual(run.epochs.count(), 2)

    def test_evaluate(self):
        data = self.write_data(split='test')
        out = self.root / 'evaluate'

        output = self.call('mahnn_evaluate', checkpoint=str(self.checkpoint),
                           data=str(data), out=str(out))

        self.assertIn('on 20 examples', output)
        self.assertEqual(self.manifest(out)['results'], {'examples': 20})

        output = self.call('mahnn_evaluate', checkpoint=str(self.checkpoint),
                           data=str(data), split='train',
                           out=str(self.root / 'none'))
        self.assertIn('accuracy 0.0000 on 0 examples', output)

    def test_evaluate_missing_checkpoint(self):
        with self.assertRaises(CommandError) as context:
            self.call('mahnn_evaluate', checkpoint=str(self.root / 'nope'),
                      data=str(self.write_data()), out=str(self.root / 'e'))

        self.assertEqual(context.exception.returncode, EXIT_CONFIG_ERROR)

    def test_attention_export_is_reproducible(self):
        data = self.write_data(size=6)
        first, second = self.root / 'attn1', self.root / 'attn2'

        for out in (first, second):
            self.call('mahnn_attn', checkpoint=str(self.checkpoint),
                      data=str(data), out=str(out))

        self.assertEqual(
            (first / 'attention.jsonl').read_bytes(),
            (second / 'attention.jsonl').read_bytes(),
        )
        records = [
            json.loads(line)
            for line in (first / 'attention.jsonl').read_text().splitlines()
        ]
        self.assertEqual(len(records), 6)
        for record in records:
            self.assertEqual(len(record['channels']), 2)
            for channel in record['channels']:
                self.assertEqual(
                    len(channel['syntactic']), len(record['tokens'])
                )
                self.assertAlmostEqual(sum(channel['syntactic']), 1.0)
        self.assertEqual(len(list((first / 'matrices').iterdir())), 6)


class AttentionExportCommandTest(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.config.write_text(
            json.dumps(dict(SMALL_CONFIG, epochs=1, max_length=24))
        )
        out = self.root / 'train'
        self.call('mahnn_train', config=str(self.config), synthetic=20,
                  out=str(out))
        self.checkpoint = out / 'checkpoint'

    def export(self, text):
        data = self.root / 'sentence.tsv'
        data.write_text(f'1\t{text}\n')
        out = self.root / 'attn'
        self.call('mahnn_attn', checkpoint=str(self.checkpoint),
                  data=str(data), out=str(out))
        return json.loads((out / 'attention.jsonl').read_text())

    def test_single_token_gets_all_the_weight(self):
        record = self.export('good')

        self.assertEqual(record['tokens'], ['good'])
        for channel in record['channels']:
            self.assertEqual(len(channel['syntactic']), 1)
            self.assertAlmostEqual(channel['syntactic'][0], 1.0, places=12)

    def test_every_channel_weights_every_token(self):
        record = self.export(
            'Uplifting as only a document of the worst possibilities of '
            'mankind can be, and among the best films of the year.'
        )

        tokens = record['tokens']
        for word in ('uplifting', 'worst', 'best'):
            self.assertIn(word, tokens)
        self.assertEqual(len(record['channels']), 2)
        for channel in record['channels']:
            self.assertEqual(len(channel['syntactic']), len(tokens))
            self.assertEqual(len(channel['semantic']), len(tokens))
            self.assertAlmostEqual(sum(channel['syntactic']), 1.0)
            for word in ('uplifting', 'worst', 'best'):
                self.assertGreater(
                    channel['syntactic'][tokens.index(word)], 0.0
                )


class CrossValidationCommandTest(CommandTestCase):

    def test_cv(self):
        out = self.root / 'cv'

        output = self.call('mahnn_cv', config=str(self.config),
                           data=str(self.write_data()), k=2, out=str(out))

        results = json.loads((out / 'cv_results.json').read_text())
        self.assertEqual(results['k'], 2)
        self.assertEqual(results['variant'], 'MahNN-2')
        self.assertEqual(len(results['folds']), 2)
        self.assertEqual(len(results['assignment']), 20)
        self.assertIn('mean', output)
        self.assertEqual(
            (out / 'cv_results.txt').read_text(), output
        )
        run = TrainingRun.objects.get()
        self.assertEqual(run.folds.count(), 2)
        self.assertEqual(run.epochs.filter(fold=1).count(), 2)

    def test_k_larger_than_the_corpus(self):
        out = self.root / 'cv'

        with self.assertRaises(CommandError) as context:
            self.call('mahnn_cv', config=str(self.config),
                      data=str(self.write_data(size=4)), k=5, out=str(out))

        self.assertEqual(context.exception.returncode, EXIT_CONFIG_ERROR)
        self.assertFalse(out.exists())

    def test_sweep(self):
        out = self.root / 'sweep'
        self.config.write_text(json.dumps(dict(SMALL_CONFIG, epochs=1)))

        output = self.call(
            'mahnn_sweep', '--parameter', 'channels', '--values', '1', '2',
            '--config', str(self.config), '--data', str(self.write_data()),
            '--k', '2', '--out', str(out),
        )

        results = json.loads((out / 'sweep_results.json').read_text())
        self.assertEqual(
            [row['channels'] for row in results['rows']], [1, 2]
        )
        self.assertEqual(
            [row['variant'] for row in results['rows']],
            ['MahNN-1', 'MahNN-2'],
        )
        self.assertIn('MahNN-2', output)

    def test_sweep_validates_every_value_first(self):
        out = self.root / 'sweep'

        with self.assertRaises(CommandError) as context:
            self.call(
                'mahnn_sweep', '--parameter', 'hidden_size',
                '--values', '4', '0', '--config', str(self.config),
                '--data', str(self.write_data()), '--out', str(out),
            )

        self.assertEqual(context.exception.returncode, EXIT_CONFIG_ERROR)
        self.assertIn('0: hidden_size', str(context.exception))
        self.assertFalse(out.exists())


class ConvertCommandTest(CommandTestCase):

    def test_convert_movie_reviews(self):
        negative = self.root / 'rt.neg'
        positive = self.root / 'rt.pos'
        negative.write_text('a dull film\n')
        positive.write_text('a warm film\nfun\n')
        out = self.root / 'mr'

        output = self.call('mahnn_convert', format='mr', source=[
            f'negative={negative}', f'positive={positive}',
        ], out=str(out))

        self.assertIn('Wrote 3 examples', output)
        report = json.loads((out / 'load_report.json').read_text())
        self.assertEqual(report['conversion']['label_counts'],
                         {'negative': 1, 'positive': 2})
        self.assertEqual(report['statistics']['N'], 3)

    def test_missing_source(self):
        out = self.root / 'mr'

        with self.assertRaises(CommandError) as context:
            self.call('mahnn_convert', format='mr',
                      source=['negative=/nonexistent'], out=str(out))

        self.assertEqual(context.exception.returncode, EXIT_CONFIG_ERROR)
        self.assertFalse(out.exists())

    def test_malformed_source_argument(self):
        with self.assertRaises(CommandError):
            self.call('mahnn_convert', format='mr', source=['negative'],
                      out=str(self.root / 'mr'))


class GradientCheckCommandTest(CommandTestCase):

    def test_every_group_passes(self):
        out = self.root / 'gradcheck'

        output = self.call('mahnn_gradcheck', out=str(out))

        self.assertIn('All 9 parameter groups within 0.0001', output)
        self.assertEqual(self.manifest(out)['results']['failing'], [])

    def test_frozen_embeddings(self):
        output = self.call('mahnn_gradcheck', freeze_embeddings=True,
                           out=str(self.root / 'gradcheck'))

        self.assertNotIn('embedding ', output)
        self.assertIn('All 8 parameter groups', output)

    def test_corrupted_gradient_fails(self):
        out = self.root / 'gradcheck'

        with self.assertRaises(CommandError) as context:
            self.call('mahnn_gradcheck', corrupt_tanh_grad=True,
                      out=str(out))

        self.assertEqual(
            context.exception.returncode, EXIT_VERIFICATION_FAILURE
        )
        manifest = self.manifest(out)
        self.assertTrue(manifest['results']['corrupted_tanh_gradient'])
        self.assertTrue(manifest['results']['failing'])

    def test_training_dropout_is_switched_off(self):
        self.config.write_text(json.dumps({'dropout': 0.5}))
        out = self.root / 'gradcheck'

        output = self.call('mahnn_gradcheck', config=str(self.config),
                           out=str(out))

        self.assertIn('All 9 parameter groups', output)
        self.assertEqual(self.manifest(out)['config']['dropout'], 0.0)
