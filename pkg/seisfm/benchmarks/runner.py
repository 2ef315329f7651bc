"""The experiment grid: encoders x decoders x strategies, each trained and scored on every task."""
from dataclasses import dataclass, field, replace
import logging
import os

import numpy as np

from decoder import build_model
from metrics import combined_ssim, evaluate, time_inference
from seisdata import DEMULTIPLE, INTERPOLATION, TASKS, CutTaskDataset, generate_task_dataset, split_counts, task_datasets
from training import load_checkpoint, save_checkpoint
from training.downstream import SCRATCH, TrainingStrategy, train_downstream
from training.pretrain import mim_pretrain


logger = logging.getLogger(__name__)


# MIM corpora are drawn from sample indices far beyond any task dataset.
CORPUS_START = 10 ** 7


@dataclass
class ReportRow:
    """One (encoder, decoder, strategy, dataset size) grid point."""
    name: str
    archetype: str
    hierarchical: bool
    strategy: str
    decoder: str = ''
    dataset_size: int = 0
    records: dict = field(default_factory=dict)
    combined: object = None
    failed: bool = False
    error: str = ''

    def _first(self, attribute, default=0):
        records = list(self.records.values())
        return getattr(records[0], attribute) if records else default

    @property
    def params_encoder(self):
        return self._first('params_encoder')

    @property
    def params_total(self):
        return self._first('params_total')

    @property
    def latency(self):
        values = [r.latency for r in self.records.values()]
        return float(np.mean(values)) if values else 0.0

    @property
    def score(self):
        """Combined SSIM, or the mean SSIM when fewer than three tasks ran."""
        if self.combined is not None:
            return self.combined.combined
        values = [r.ssim for r in self.records.values()]
        return float(np.mean(values)) if values else 0.0

    def ordered_records(self):
        return [(t, self.records[t]) for t in TASKS if t in self.records]


def task_shape(config, task):
    """Gather shape the models of a task see."""
    return tuple(config.data.demultiple_shape if task == DEMULTIPLE else config.data.cut_shape)


def _limit(training, size):
    if size is None or size >= len(training):
        return training
    if isinstance(training, CutTaskDataset):
        return CutTaskDataset(training.task, size, training.seed, training.config, training.start, training.workers)
    return training[:size]


class Experiment(object):
    """Holds the datasets, checkpoints and models of one ExperimentConfig.

    Datasets and MIM checkpoints are produced once and shared by every grid
    row that needs them.
    """

    def __init__(self, config):
        self.config = config.validate()
        self._datasets = {}
        self._checkpoints = dict(config.pretrain.checkpoints)

    # -- data ------------------------------------------------------------

    def datasets(self, task):
        """(training, held_out) for a task."""
        if task not in self._datasets:
            self._datasets[task] = task_datasets(task, self.config.counts[task], self.config.seed,
                                                 self.config.data, self.config.workers)
        return self._datasets[task]

    def corpus(self):
        """Clean, normalised shot-gather cuts disjoint from every task dataset."""
        count = self.config.pretrain.count
        samples = generate_task_dataset(INTERPOLATION, count, self.config.seed, self.config.data,
                                        self.config.workers, start=CORPUS_START)
        return [s.label for s in samples]

    # -- pre-training ------------------------------------------------------

    def checkpoint(self, name, refresh=False):
        """Path of the MIM checkpoint of an encoder.

        A checkpoint named in the config wins. Otherwise one left in the output
        directory by an earlier `pretrain` is reused, and the encoder is only
        pre-trained when neither exists or `refresh` is set.
        """
        path = self.config.path('checkpoints', '%s.mim.spck' % name)
        if name not in self._checkpoints and not refresh and os.path.exists(path):
            logger.info("Reusing MIM checkpoint %s", path)
            self._checkpoints[name] = path
        if refresh or name not in self._checkpoints:
            train = replace(self.config.train, epochs=self.config.pretrain.epochs)
            mim_pretrain(self.config.encoder(name), self.corpus(), self.config.pretrain.mask_ratio, train,
                         checkpoint_path=path, dtype=self.config.compute_dtype)
            self._checkpoints[name] = path
        return self._checkpoints[name]

    # -- training and scoring ------------------------------------------------

    def model_path(self, row_name, strategy, task, size=None):
        stem = '%s.%s.%s' % (row_name, strategy, task)
        if size is not None:
            stem += '.n%d' % size
        return self.config.path('models', stem + '.spck')

    def train(self, name, decoder_config, strategy, task, size=None):
        training, _ = self.datasets(task)
        checkpoint = self.checkpoint(name) if strategy != SCRATCH else None
        result = train_downstream(self.config.encoder(name), decoder_config, TrainingStrategy(strategy, checkpoint),
                                  _limit(training, size), self.config.train, task, self.config.compute_dtype)
        return result.model

    def score(self, model, task, timing=None):
        """MetricsRecord of a model on the held-out split, with sizes and (optionally) timing."""
        _, held_out = self.datasets(task)
        timing = self.config.bench.timing if timing is None else timing
        record = evaluate(model.predict, held_out, task, batch=self.config.train.batch)
        encoder_size, total = model.encoder.parameter_count, model.store.count()
        record = replace(record, params_encoder=encoder_size, params_total=total)
        if timing:
            result = self.time(model, task_shape(self.config, task))
            record = replace(record, latency=result.latency, throughput=result.throughput)
        logger.info("%s: encoder holds %.1f%% of %d parameters", task, 100.0 * encoder_size / total, total)
        return record

    def time(self, model, shape):
        bench = self.config.bench
        return time_inference(model, bench.batch, shape, bench.warmup, bench.reps, seed=self.config.seed)

    def load_model(self, name, decoder_config, task, path):
        """Rebuilds a trained model for `task` from its saved checkpoint."""
        encoder_config = self.config.encoder(name).with_input_shape(task_shape(self.config, task))
        model = build_model(encoder_config, decoder_config, self.config.seed, self.config.compute_dtype)
        model.store.load_from(load_checkpoint(path, model.store.dtype))
        return model

    # -- the grid ------------------------------------------------------------

    def grid(self):
        """(row name, encoder name, decoder label, decoder config, strategy, size) in report order."""
        sizes = self.config.dataset_sizes or (None,)
        several = len(self.config.decoders) > 1
        for size in sizes:
            for name, _ in self.config.encoders:
                for label, decoder_config in self.config.decoders:
                    row_name = '%s+%s' % (name, label) if several else name
                    for strategy in self.config.strategies:
                        yield row_name, name, label, decoder_config, strategy, size

    def run_row(self, row_name, name, label, decoder_config, strategy, size, save_models=True):
        encoder_config = self.config.encoder(name)
        row = ReportRow(row_name, encoder_config.archetype, encoder_config.hierarchical, strategy, label)
        sizes = []
        try:
            for task in self.config.tasks:
                model = self.train(name, decoder_config, strategy, task, size)
                if save_models:
                    save_checkpoint(model.store, self.model_path(row_name, strategy, task, size))
                row.records[task] = self.score(model, task)
                sizes.append(len(_limit(self.datasets(task)[0], size)))
            if all(t in row.records for t in TASKS):
                row.combined = combined_ssim({t: r.ssim for t, r in row.records.items()})
        except Exception as e:
            logger.exception("Grid row %s (%s) failed", row_name, strategy)
            row.failed = True
            row.error = "%s: %s" % (type(e).__name__, e)
        row.dataset_size = max(sizes) if sizes else (size or 0)
        return row

    def run(self, save_models=True):
        rows = [self.run_row(*point, save_models=save_models) for point in self.grid()]
        failed = sum(r.failed for r in rows)
        logger.info("Experiment %s finished: %d rows, %d failed", self.config.name, len(rows), failed)
        return rows


def run_experiment(config, save_models=True):
    """Runs the whole grid and returns one ReportRow per grid point."""
    os.makedirs(config.output_dir, exist_ok=True)
    return Experiment(config).run(save_models)


def held_out_samples(config, task, count=None):
    """The evaluation split of a task, regenerated from the experiment seed."""
    train, held = split_counts(config.counts[task])
    if count:
        held = min(held, count)
    return generate_task_dataset(task, held, config.seed, config.data.for_evaluation(), config.workers, start=train)
