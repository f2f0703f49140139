import contextlib

from django.core.management.base import CommandError

from mahnn.constants import EXIT_VERIFICATION_FAILURE, PRECISION_F64
from mahnn.forms import parse_config, read_config_document
from mahnn.management.base import MahnnCommand
from mahnn.tensor import corrupted_tanh_gradient
from mahnn.utils.gradcheck import (
    GRADIENT_TOLERANCE,
    TOY_SETTINGS,
    build_toy_model,
    failing_groups,
    gradient_check,
    toy_batch,
)
from mahnn.utils.run_manifest import RunRecorder


class Command(MahnnCommand):
    help = (
        'Compares analytic and finite difference gradients of a toy model '
        'for every parameter group'
    )

    def add_arguments(self, parser):
        parser.add_argument(
            '--config', help='JSON document overriding the toy configuration'
        )
        parser.add_argument('--seed', type=int)
        parser.add_argument('--eps', type=float, default=1e-5)
        parser.add_argument(
            '--freeze-embeddings', action='store_true',
            help='keep the embedding table out of the check'
        )
        parser.add_argument(
            '--corrupt-tanh-grad', action='store_true',
            help='inject a wrong tanh derivative, the check must fail'
        )
        self.add_out_argument(parser)

    def resolve_config(self, options, **extra):
        document = dict(TOY_SETTINGS)
        if options.get('config'):
            document.update(read_config_document(options['config']))
        return parse_config(
            document,
            seed=options.get('seed'),
            precision=PRECISION_F64,
            dropout=0.0,
            freeze_embeddings=options.get('freeze_embeddings') or None,
        )

    def run(self, **options):
        config = self.resolve_config(options)
        out_dir = self.out_dir(options)
        recorder = RunRecorder(
            'mahnn_gradcheck', out_dir, config=config,
            inputs={'config': options.get('config')},
        )

        corrupt = options.get('corrupt_tanh_grad')
        model = build_toy_model(config)
        ids, masks, labels = toy_batch(model, seed=config.seed)

        context = corrupted_tanh_gradient() if corrupt \
            else contextlib.nullcontext()
        with context:
            report = gradient_check(
                model, ids, masks, labels, seed=config.seed, eps=options['eps']
            )

        failing = failing_groups(report)
        recorder.finish(results={
            'max_relative_error': dict(report),
            'tolerance': GRADIENT_TOLERANCE,
            'failing': failing,
            'corrupted_tanh_gradient': bool(corrupt),
        })

        width = max(len(group) for group in report)
        for group, error in report.items():
            status = 'FAIL' if group in failing else 'ok'
            self.stdout.write(f'{group.ljust(width)}  {error:.3e}  {status}')

        if failing:
            raise CommandError(
                f'Gradient check failed for {", ".join(failing)} '
                f'(tolerance {GRADIENT_TOLERANCE:g})',
                returncode=EXIT_VERIFICATION_FAILURE
            )
        self.stdout.write(self.style.SUCCESS(
            f'All {len(report)} parameter groups within '
            f'{GRADIENT_TOLERANCE:g}'
        ))
