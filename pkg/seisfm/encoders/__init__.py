from seisfm.exceptions import ConfigurationError

from .config import ARCHETYPES, CONV, GLOBAL, HYBRID, PRESETS, WINDOWED, EncoderConfig, default_taps, preset
from .build import Encoder, FeaturePyramid, build_encoder, encode, is_hierarchical
