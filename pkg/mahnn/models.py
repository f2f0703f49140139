from django.db import models

from .constants import RUN_COMPLETED, RUN_RUNNING, RUN_STATUS_CHOICES
from .querysets import TrainingRunQuerySet


class TrainingRun(models.Model):
    """Database mirror of the manifest every command writes"""
    command = models.CharField(max_length=64)
    status = models.PositiveSmallIntegerField(
        choices=RUN_STATUS_CHOICES,
        default=RUN_RUNNING
    )
    variant = models.CharField(max_length=32, blank=True)
    seed = models.IntegerField(blank=True, null=True)
    config = models.JSONField(default=dict, blank=True)
    inputs = models.JSONField(default=dict, blank=True)
    outputs = models.JSONField(default=list, blank=True)
    checksums = models.JSONField(default=dict, blank=True)
    accuracy = models.FloatField(blank=True, null=True)
    error = models.TextField(blank=True)
    wall_clock = models.FloatField(blank=True, null=True)

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    objects = TrainingRunQuerySet.as_manager()

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        label = f'{self.command} #{self.pk}'
        if self.variant:
            label = f'{label} ({self.variant})'
        return label

    @property
    def is_completed(self):
        return self.status == RUN_COMPLETED


class EpochMetric(models.Model):
    run = models.ForeignKey(
        TrainingRun,
        on_delete=models.CASCADE,
        related_name='epochs'
    )
    fold = models.PositiveIntegerField(blank=True, null=True)
    epoch = models.PositiveIntegerField()
    loss = models.FloatField()
    train_accuracy = models.FloatField()
    dev_accuracy = models.FloatField(blank=True, null=True)

    class Meta:
        ordering = ['fold', 'epoch']

    def __str__(self):
        return f'Epoch {self.epoch} of run #{self.run_id}'


class FoldResult(models.Model):
    run = models.ForeignKey(
        TrainingRun,
        on_delete=models.CASCADE,
        related_name='folds'
    )
    fold = models.PositiveIntegerField()
    train_size = models.PositiveIntegerField()
    test_size = models.PositiveIntegerField()
    accuracy = models.FloatField()

    class Meta:
        ordering = ['fold']

    def __str__(self):
        return f'Fold {self.fold} of run #{self.run_id}'
