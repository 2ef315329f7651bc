from django.db import models, migrations
import django.db.models.deletion
import django.utils.timezone
import model_utils.fields


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.AutoField(verbose_name='ID', serialize=False, auto_created=True, primary_key=True)),
                ('created', model_utils.fields.AutoCreatedField(default=django.utils.timezone.now, verbose_name='created', editable=False)),
                ('modified', model_utils.fields.AutoLastModifiedField(default=django.utils.timezone.now, verbose_name='modified', editable=False)),
                ('name', models.CharField(max_length=255)),
                ('seed', models.BigIntegerField()),
                ('output_dir', models.CharField(max_length=1024)),
                ('config_text', models.TextField(blank=True)),
                ('status', models.CharField(choices=[('running', 'Running'), ('finished', 'Finished'), ('failed', 'Finished with failed rows')], default='running', max_length=16)),
                ('failed_rows', models.IntegerField(default=0)),
            ],
            options={
                'abstract': False,
            },
        ),
        migrations.CreateModel(
            name='ReportRecord',
            fields=[
                ('id', models.AutoField(verbose_name='ID', serialize=False, auto_created=True, primary_key=True)),
                ('created', model_utils.fields.AutoCreatedField(default=django.utils.timezone.now, verbose_name='created', editable=False)),
                ('modified', model_utils.fields.AutoLastModifiedField(default=django.utils.timezone.now, verbose_name='modified', editable=False)),
                ('position', models.IntegerField()),
                ('name', models.CharField(max_length=255)),
                ('archetype', models.CharField(max_length=64)),
                ('hierarchical', models.BooleanField(default=False)),
                ('strategy', models.CharField(max_length=16)),
                ('decoder', models.CharField(blank=True, max_length=255)),
                ('dataset_size', models.IntegerField(default=0)),
                ('params_encoder', models.BigIntegerField(default=0)),
                ('params_total', models.BigIntegerField(default=0)),
                ('task', models.CharField(max_length=16)),
                ('mse', models.FloatField(blank=True, null=True)),
                ('psnr_db', models.FloatField(blank=True, null=True)),
                ('ssim', models.FloatField(blank=True, null=True)),
                ('ssim_combined', models.FloatField(blank=True, null=True)),
                ('latency_s', models.FloatField(blank=True, null=True)),
                ('throughput_gps', models.FloatField(blank=True, null=True)),
                ('error', models.TextField(blank=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='records', to='benchmarks.ExperimentRun')),
            ],
            options={
                'unique_together': {('run', 'position', 'task')},
            },
        ),
    ]
