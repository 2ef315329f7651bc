"""Synthetic gathers for the three benchmark tasks, augmentation and file I/O."""
from .errors import GatherFormatError, InfeasibleCutError, SegyError, SeisDataError
from .gather import DEMULTIPLE, DENOISE, INTERPOLATION, TASKS, Gather, LayeredModel, MaskedGather, TaskSample
from .synth import random_layered_model, ricker_wavelet, synthesize_demultiple_pair, synthesize_shot_gather
from .augment import GAUSSIAN, UNIFORM, add_noise, denormalize, mask_traces, normalize, random_cut_below_first_break
from .native import read_gather, write_gather
from .segy import read_segy, write_segy
from .datasets import (PAPER_SCALE, CutTaskDataset, DataConfig, generate_task_dataset, make_sample, read_dataset,
                       split_counts, task_datasets, write_dataset)
