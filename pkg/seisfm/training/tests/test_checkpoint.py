import os
import struct
import tempfile
import unittest

import numpy as np

from decoder import DecoderConfig, build_model
from seisfm.exceptions import ConfigurationError
from training import CheckpointError, load_checkpoint, restore_encoder, save_checkpoint
from training.checkpoint import decode_checkpoint, encode_checkpoint
from training.store import DECODER, ENCODER

import encoders.tests.helper as encoder_helper
import training.tests.helper as helper


class CheckpointRoundTripTests(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'model.spck')

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip_bit_identical(self):
        store = helper.create_store()
        store.set_trainable(ENCODER, False)
        save_checkpoint(store, self.path)
        loaded = load_checkpoint(self.path)
        self.assertEqual(loaded.names(), store.names())
        self.assertEqual(loaded.digest(), store.digest())
        self.assertFalse(loaded.is_trainable(ENCODER))
        self.assertTrue(loaded.is_trainable(DECODER))
        self.assertEqual([loaded.partition_of(n) for n in loaded], [store.partition_of(n) for n in store])

    def test_file_size(self):
        store = helper.create_store()
        size = save_checkpoint(store, self.path)
        expected = 9 + sum(4 + len(n.encode()) + 3 + 4 * t.ndim + 4 * t.size for n, t in store.items())
        self.assertEqual(size, expected)
        self.assertEqual(os.path.getsize(self.path), expected)

    def test_encoder_only_partition(self):
        store = helper.create_store()
        save_checkpoint(store, self.path, ENCODER)
        loaded = load_checkpoint(self.path)
        self.assertEqual(loaded.names(), store.names(ENCODER))

    def test_restore_leaves_decoder_at_init(self):
        config = encoder_helper.small_config()
        trained = build_model(config, DecoderConfig(), seed=3)
        save_checkpoint(trained.store, self.path, ENCODER)
        fresh = build_model(config, DecoderConfig(), seed=4)
        decoder_before = fresh.store.digest(DECODER)
        restore_encoder(fresh.store, self.path)
        self.assertEqual(fresh.store.digest(ENCODER), trained.store.digest(ENCODER))
        self.assertEqual(fresh.store.digest(DECODER), decoder_before)

    def test_restore_into_other_archetype(self):
        save_checkpoint(encoder_helper.build(seed=0, dtype=np.float32).store, self.path)
        other = encoder_helper.build(encoder_helper.WINDOWED, dtype=np.float32)
        with self.assertRaisesRegex(ConfigurationError, "missing"):
            restore_encoder(other.store, self.path)


class CheckpointCorruptionTests(unittest.TestCase):

    def setUp(self):
        self.payload = encode_checkpoint(helper.create_store())

    def test_bad_magic(self):
        with self.assertRaises(CheckpointError) as cm:
            decode_checkpoint(b'XPCK' + self.payload[4:])
        self.assertEqual(cm.exception.offset, 0)

    def test_bad_version(self):
        with self.assertRaises(CheckpointError) as cm:
            decode_checkpoint(self.payload[:4] + b'\x02' + self.payload[5:])
        self.assertEqual(cm.exception.offset, 4)

    def test_corrupted_name_length(self):
        corrupted = self.payload[:9] + struct.pack('<I', 10 ** 6) + self.payload[13:]
        with self.assertRaises(CheckpointError) as cm:
            decode_checkpoint(corrupted)
        self.assertEqual(cm.exception.offset, 9)
        self.assertIn("at byte 9", str(cm.exception))

    def test_truncated(self):
        with self.assertRaisesRegex(CheckpointError, "Truncated"):
            decode_checkpoint(self.payload[:-3])

    def test_trailing_bytes(self):
        with self.assertRaises(CheckpointError) as cm:
            decode_checkpoint(self.payload + b'\x00')
        self.assertEqual(cm.exception.offset, len(self.payload))

    def test_duplicate_names(self):
        header = struct.pack('<BI', 1, 2)
        body = self.payload[9:]
        first = body[:4 + struct.unpack('<I', body[:4])[0] + 3 + 4 * 4 + 4 * 16]
        with self.assertRaisesRegex(CheckpointError, "Duplicate"):
            decode_checkpoint(b'SPCK' + header + first + first)
