from django.test import TestCase

from model_bakery import baker

from mahnn.constants import RUN_COMPLETED, RUN_FAILED, RUN_RUNNING
from mahnn.models import EpochMetric, FoldResult, TrainingRun


class TrainingRunModelTest(TestCase):

    def setUp(self):
        self.completed_runs = baker.make(
            TrainingRun, command='mahnn_train', status=RUN_COMPLETED,
            _quantity=2
        )
        self.failed_run = baker.make(
            TrainingRun, command='mahnn_cv', status=RUN_FAILED
        )
        self.running_run = baker.make(
            TrainingRun, command='mahnn_cv', variant='MahNN-3'
        )

    def test_str(self):
        self.assertEqual(
            str(self.running_run), f'mahnn_cv #{self.running_run.pk} (MahNN-3)'
        )
        self.assertEqual(
            str(self.failed_run), f'mahnn_cv #{self.failed_run.pk}'
        )

    def test_default_status(self):
        self.assertEqual(self.running_run.status, RUN_RUNNING)
        self.assertFalse(self.running_run.is_completed)

    def test_completed_queryset(self):
        runs = TrainingRun.objects.completed()

        self.assertEqual(runs.count(), 2)
        self.assertTrue(all(run.is_completed for run in runs))

    def test_failed_queryset(self):
        self.assertEqual(
            list(TrainingRun.objects.failed()), [self.failed_run]
        )

    def test_for_command_queryset(self):
        runs = TrainingRun.objects.for_command('mahnn_cv')

        self.assertEqual(runs.count(), 2)

    def test_json_defaults(self):
        self.assertEqual(self.running_run.config, {})
        self.assertEqual(self.running_run.outputs, [])


class EpochMetricModelTest(TestCase):

    def setUp(self):
        self.run = baker.make(TrainingRun)
        baker.make(EpochMetric, run=self.run, fold=1, epoch=2)
        baker.make(EpochMetric, run=self.run, fold=0, epoch=2)
        baker.make(EpochMetric, run=self.run, fold=0, epoch=1)

    def test_ordering(self):
        self.assertEqual(
            [(m.fold, m.epoch) for m in self.run.epochs.all()],
            [(0, 1), (0, 2), (1, 2)]
        )

    def test_str(self):
        metric = self.run.epochs.first()

        self.assertEqual(str(metric), f'Epoch 1 of run #{self.run.pk}')


class FoldResultModelTest(TestCase):

    def test_str_and_ordering(self):
        run = baker.make(TrainingRun)
        baker.make(FoldResult, run=run, fold=1)
        baker.make(FoldResult, run=run, fold=0)

        folds = list(run.folds.all())

        self.assertEqual([f.fold for f in folds], [0, 1])
        self.assertEqual(str(folds[0]), f'Fold 0 of run #{run.pk}')
