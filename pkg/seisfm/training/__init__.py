"""Parameter storage, losses, AdamW and checkpoints.

MIM pre-training and downstream training build full models and live in
`training.pretrain` and `training.downstream`; they are not imported here
because the model packages themselves depend on `training.store`.
"""
from .checkpoint import load_checkpoint, restore_encoder, save_checkpoint
from .errors import CheckpointError, FreezeViolation
from .losses import l1_loss, l2_loss
from .optim import AdamW, TrainConfig, adamw_step, collect_gradients
from .store import DECODER, ENCODER, PARTITIONS, ParameterStore
