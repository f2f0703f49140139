from mahnn.management.base import MahnnCommand
from mahnn.utils.attention_export import export_attention
from mahnn.utils.checkpoint import load_checkpoint
from mahnn.utils.run_manifest import RunRecorder


class Command(MahnnCommand):
    help = (
        'Exports per channel attention weights of a checkpoint as JSON lines '
        'and one CSV matrix per example'
    )

    def add_arguments(self, parser):
        parser.add_argument('--checkpoint', required=True)
        parser.add_argument('--data', required=True)
        self.add_out_argument(parser)

    def run(self, **options):
        model, _ = load_checkpoint(options['checkpoint'])
        corpus, _ = self.load_data(options['data'], schema=model.class_names)

        out_dir = self.out_dir(options)
        recorder = RunRecorder(
            'mahnn_attn', out_dir, config=model.config,
            inputs={'checkpoint': options['checkpoint'],
                    'data': options['data']},
        )

        try:
            written = export_attention(model, corpus, out_dir)
        except Exception as e:
            recorder.fail(e)
            raise

        recorder.add_output(*written)
        recorder.finish(results={'examples': len(written) - 1})
        self.stdout.write(self.style.SUCCESS(
            f'Exported attention of {len(written) - 1} examples to {out_dir}'
        ))
