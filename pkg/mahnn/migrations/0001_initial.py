# Generated by Django 3.1.1 on 2026-10-18 12:00

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='TrainingRun',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=64)),
                ('status', models.PositiveSmallIntegerField(choices=[(1, 'Running'), (2, 'Completed'), (3, 'Failed')], default=1)),
                ('variant', models.CharField(blank=True, max_length=32)),
                ('seed', models.IntegerField(blank=True, null=True)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('inputs', models.JSONField(blank=True, default=dict)),
                ('outputs', models.JSONField(blank=True, default=list)),
                ('checksums', models.JSONField(blank=True, default=dict)),
                ('accuracy', models.FloatField(blank=True, null=True)),
                ('error', models.TextField(blank=True)),
                ('wall_clock', models.FloatField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='FoldResult',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('fold', models.PositiveIntegerField()),
                ('train_size', models.PositiveIntegerField()),
                ('test_size', models.PositiveIntegerField()),
                ('accuracy', models.FloatField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='folds', to='mahnn.trainingrun')),
            ],
            options={
                'ordering': ['fold'],
            },
        ),
        migrations.CreateModel(
            name='EpochMetric',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('fold', models.PositiveIntegerField(blank=True, null=True)),
                ('epoch', models.PositiveIntegerField()),
                ('loss', models.FloatField()),
                ('train_accuracy', models.FloatField()),
                ('dev_accuracy', models.FloatField(blank=True, null=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='epochs', to='mahnn.trainingrun')),
            ],
            options={
                'ordering': ['fold', 'epoch'],
            },
        ),
    ]
