from mahnn.constants import SPLIT_NAMES
from mahnn.management.base import MahnnCommand
from mahnn.tensor import precision
from mahnn.utils.checkpoint import load_checkpoint
from mahnn.utils.run_manifest import RunRecorder
from mahnn.utils.training import evaluate


class Command(MahnnCommand):
    help = 'Scores a saved checkpoint on a labelled file'

    def add_arguments(self, parser):
        parser.add_argument('--checkpoint', required=True)
        parser.add_argument('--data', required=True)
        parser.add_argument(
            '--split', choices=SPLIT_NAMES,
            help='only score rows that declare this split'
        )
        self.add_out_argument(parser)

    def run(self, **options):
        model, _ = load_checkpoint(options['checkpoint'])
        corpus, _ = self.load_data(
            options['data'], schema=model.class_names
        )
        if options.get('split'):
            corpus = corpus.subset([
                index for index, example in enumerate(corpus)
                if example.split == options['split']
            ])

        out_dir = self.out_dir(options)
        recorder = RunRecorder(
            'mahnn_evaluate', out_dir, config=model.config,
            inputs={'checkpoint': options['checkpoint'],
                    'data': options['data']},
        )

        with precision(model.config.precision):
            accuracy = evaluate(model, corpus)

        recorder.finish(accuracy=accuracy, results={'examples': len(corpus)})
        self.stdout.write(
            f'{model.config.variant}: accuracy {accuracy:.4f} '
            f'on {len(corpus)} examples'
        )
