from django.contrib import admin, messages

from .constants import RUN_FAILED
from .models import EpochMetric, FoldResult, TrainingRun


class EpochMetricInline(admin.TabularInline):
    model = EpochMetric
    readonly_fields = (
        'fold', 'epoch', 'loss', 'train_accuracy', 'dev_accuracy',
    )
    extra = 0
    can_delete = False


class FoldResultInline(admin.TabularInline):
    model = FoldResult
    readonly_fields = ('fold', 'train_size', 'test_size', 'accuracy',)
    extra = 0
    can_delete = False


class TrainingRunAdmin(admin.ModelAdmin):
    date_hierarchy = 'created_at'
    list_display = (
        'id', 'command', 'variant',
        'status', 'accuracy',
        'seed', 'created_at',
    )
    list_filter = ('status', 'command', 'variant',)
    search_fields = ('command', 'variant', 'error',)
    readonly_fields = (
        'config', 'inputs', 'outputs', 'checksums',
        'wall_clock', 'created_at', 'updated_at',
    )
    sortable_by = ('created_at', 'accuracy',)
    inlines = (FoldResultInline, EpochMetricInline,)

    actions = ('mark_failed',)

    def mark_failed(self, request, queryset):
        updated = queryset.update(status=RUN_FAILED)
        messages.add_message(
            request,
            messages.SUCCESS,
            f'Successfully marked {updated} run(s) as failed',
        )

    mark_failed.short_description = 'Mark runs as failed'


admin.site.register(TrainingRun, TrainingRunAdmin)
