from seisfm.exceptions import ConfigurationError

from .config import BILINEAR, BLOCKS, DOUBLE_CONV, MODERN_CONV, TRANSPOSED_CONV, UPSAMPLERS, DecoderConfig
from .build import Decoder, EncoderDecoder, block_parameter_count, build_decoder, build_model, decode
