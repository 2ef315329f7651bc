"""Inference timing of each encoder + decoder pair."""
from benchmarks.management.base import ExperimentCommand
from benchmarks.runner import task_shape
from decoder import build_model
from metrics import time_inference


class Command(ExperimentCommand):
    help = "Times inference for every encoder and decoder and writes <out>/timing.json"

    def handle_experiment(self, config, /, **options):
        bench = config.bench
        shapes = sorted({task_shape(config, task) for task in config.tasks})
        results = []
        for name, encoder_config in config.encoders:
            for label, decoder_config in config.decoders:
                for shape in shapes:
                    model = build_model(encoder_config.with_input_shape(shape), decoder_config, config.seed,
                                        config.compute_dtype)
                    timing = time_inference(model, bench.batch, shape, bench.warmup, bench.reps, seed=config.seed)
                    results.append({
                        'name': name,
                        'decoder': label,
                        'shape': list(shape),
                        'batch': bench.batch,
                        'params_encoder': model.encoder.parameter_count,
                        'params_total': model.store.count(),
                        'latency_s': timing.latency,
                        'throughput_gps': timing.throughput,
                        'samples': list(timing.samples),
                    })
                    self.stdout.write("%s + %s at %dx%d: %.4f s per batch of %d"
                                      % (name, label, shape[0], shape[1], timing.latency, bench.batch))
        self.write_json(config.path('timing.json'), {'experiment': config.name, 'results': results})
