"""Model definitions for the Benchmarks app"""
from django.db import models, transaction

from model_utils.models import TimeStampedModel

from metrics import MetricsRecord, combined_ssim
from seisdata import TASKS

from .reports import FAILED_TASK, report_lines
from .runner import ReportRow


class ExperimentRun(TimeStampedModel):
    RUNNING = 'running'
    FINISHED = 'finished'
    FAILED = 'failed'
    STATUS_CHOICES = (
        (RUNNING, 'Running'),
        (FINISHED, 'Finished'),
        (FAILED, 'Finished with failed rows'),
    )

    name = models.CharField(max_length=255)
    seed = models.BigIntegerField()
    output_dir = models.CharField(max_length=1024)
    config_text = models.TextField(blank=True)
    status = models.CharField(max_length=16, choices=STATUS_CHOICES, default=RUNNING)
    failed_rows = models.IntegerField(default=0)

    def __str__(self):
        return "%s (seed %d, %s)" % (self.name, self.seed, self.status)

    @transaction.atomic
    def record_rows(self, rows):
        """Replaces the stored report with `rows` and settles the run status."""
        self.records.all().delete()
        records = [ReportRecord(run=self, position=position, **{f: line[f] for f in ReportRecord.LINE_FIELDS})
                   for position, row in enumerate(rows) for line in report_lines([row])]
        ReportRecord.objects.bulk_create(records)
        self.failed_rows = sum(1 for r in rows if r.failed)
        self.status = self.FAILED if self.failed_rows else self.FINISHED
        self.save()
        return len(records)

    def report_rows(self):
        """Rebuilds the ReportRows of this run, in their original order."""
        rows = []
        position = None
        for record in self.records.order_by('position', 'id'):
            if record.position != position:
                position = record.position
                rows.append(ReportRow(record.name, record.archetype, record.hierarchical, record.strategy,
                                      record.decoder, record.dataset_size))
            row = rows[-1]
            if record.task == FAILED_TASK:
                row.failed = True
                row.error = record.error
            else:
                row.records[record.task] = record.metrics_record()
        for row in rows:
            if all(t in row.records for t in TASKS):
                row.combined = combined_ssim({t: r.ssim for t, r in row.records.items()})
        return rows


class ReportRecord(TimeStampedModel):
    """One line of a report: a grid row's result on one task."""
    LINE_FIELDS = ('name', 'archetype', 'hierarchical', 'strategy', 'decoder', 'dataset_size', 'params_encoder',
                   'params_total', 'task', 'mse', 'psnr_db', 'ssim', 'ssim_combined', 'latency_s',
                   'throughput_gps', 'error')

    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='records')
    position = models.IntegerField()
    name = models.CharField(max_length=255)
    archetype = models.CharField(max_length=64)
    hierarchical = models.BooleanField(default=False)
    strategy = models.CharField(max_length=16)
    decoder = models.CharField(max_length=255, blank=True)
    dataset_size = models.IntegerField(default=0)
    params_encoder = models.BigIntegerField(default=0)
    params_total = models.BigIntegerField(default=0)
    task = models.CharField(max_length=16)
    mse = models.FloatField(null=True, blank=True)
    psnr_db = models.FloatField(null=True, blank=True)
    ssim = models.FloatField(null=True, blank=True)
    ssim_combined = models.FloatField(null=True, blank=True)
    latency_s = models.FloatField(null=True, blank=True)
    throughput_gps = models.FloatField(null=True, blank=True)
    error = models.TextField(blank=True)

    def __str__(self):
        return "%s/%s on %s" % (self.name, self.strategy, self.task)

    def metrics_record(self):
        return MetricsRecord(self.task, self.mse, self.psnr_db, self.ssim, self.params_encoder, self.params_total,
                             self.throughput_gps, self.latency_s)

    class Meta:
        unique_together = (('run', 'position', 'task'),)
