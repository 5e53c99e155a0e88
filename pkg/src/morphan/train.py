"""Joint training of the embedder and classifier, and the checkpoint file format.

Checkpoint layout (all integers little-endian)::

    b"MRPH" | u32 version | u32 n + language tag (UTF-8)
    | u32 n + header (canonical JSON: config, vocab, losses, manifest)
    | parameters as raw float32, in manifest order | u32 CRC-32 of all preceding bytes

Each manifest entry records a parameter's name, shape, byte offset into
the parameter block and byte count.
"""
from __future__ import annotations

import json
import logging
import struct
import zlib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .augment import augment_for_training
from .corpus import AnalogyDataset, AnalogyQuadruple, analogy_words, sample_quadruples
from .embedder import CharVocab, build_vocab
from .model import AnalogyModel
from .nn.optim import AdamState, adam_step

log = logging.getLogger(__name__)

MAGIC = b"MRPH"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    epochs: int = 20
    train_sample_size: int | None = 50000
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    neg_forms_per_base: int = 3
    dedup_conflicts: bool = False
    m: int = 64
    filters: int = 16
    widths: tuple = (2, 3, 4, 5, 6)
    conv1_filters: int = 128
    conv2_filters: int = 64
    bias: bool = True
    language: str = ""

    def __post_init__(self):
        self.widths = tuple(self.widths)
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.neg_forms_per_base not in (3, 8):
            raise ValueError("neg_forms_per_base must be 3 or 8")
        if self.train_sample_size is not None and self.train_sample_size < 1:
            raise ValueError("train_sample_size must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["widths"] = list(self.widths)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class Checkpoint:
    language: str
    config: TrainConfig
    model: AnalogyModel
    final_loss: float
    epoch_losses: list = field(default_factory=list)
    version: int = FORMAT_VERSION

    @property
    def vocab(self) -> CharVocab:
        return self.model.vocab

    def __eq__(self, other) -> bool:
        if not isinstance(other, Checkpoint):
            return NotImplemented
        if (self.language, self.config, self.final_loss, self.epoch_losses, self.version, self.vocab) != \
                (other.language, other.config, other.final_loss, other.epoch_losses, other.version, other.vocab):
            return False
        a, b = self.model.params, other.model.params
        return a.keys() == b.keys() and all(
            a[k].dtype == b[k].dtype and a[k].shape == b[k].shape and a[k].tobytes() == b[k].tobytes() for k in a)


def build_model(vocab: CharVocab, config: TrainConfig, dtype=np.float32) -> AnalogyModel:
    return AnalogyModel(vocab, m=config.m, seed=config.seed, dtype=dtype, widths=config.widths,
                        filters=config.filters, conv1_filters=config.conv1_filters,
                        conv2_filters=config.conv2_filters, bias=config.bias)


def training_examples(q: AnalogyQuadruple, config: TrainConfig) -> list[AnalogyQuadruple]:
    aug = augment_for_training(q, config.neg_forms_per_base, config.dedup_conflicts)
    return aug.examples


def _epoch_order(n: int, seed: int, epoch: int) -> np.ndarray:
    return np.random.default_rng([seed, epoch]).permutation(n)


def train(dataset: AnalogyDataset | Sequence[AnalogyQuadruple], config: TrainConfig,
          callback: Callable | None = None) -> Checkpoint:
    """Train a fresh model; deterministic for a given dataset and config.

    ``callback(epoch, batch_index, examples, loss)`` is called after every update.
    """
    if isinstance(dataset, AnalogyDataset):
        if dataset.split != "train":
            raise ValueError(f"training needs the train split, got {dataset.split!r}")
        quads = dataset.quadruples
    else:
        quads = list(dataset)
    if not quads:
        raise ValueError("cannot train on an empty dataset")
    if config.train_sample_size is not None and config.train_sample_size > len(quads):
        log.warning("sample size %d exceeds %d available analogies; using all",
                    config.train_sample_size, len(quads))
    quads = sample_quadruples(quads, config.train_sample_size, config.seed)
    vocab = build_vocab(analogy_words(quads))
    model = build_model(vocab, config)
    state = AdamState(lr=config.learning_rate, beta1=config.beta1, beta2=config.beta2, eps=config.adam_eps)
    params = model.params

    epoch_losses = []
    for epoch in range(config.epochs):
        order = _epoch_order(len(quads), config.seed, epoch)
        total, count = 0.0, 0
        for b, start in enumerate(range(0, len(order), config.batch_size)):
            batch = [quads[i] for i in order[start:start + config.batch_size]]
            examples = [ex for q in batch for ex in training_examples(q, config)]
            loss, grads = model.loss_and_grads(examples)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {b}: first base {batch[0].words}")
            adam_step(params, grads, state)
            total += loss * len(examples)
            count += len(examples)
            if callback is not None:
                callback(epoch, b, examples, loss)
        epoch_losses.append(total / count)
        log.info("epoch %d/%d mean BCE %.5f", epoch + 1, config.epochs, epoch_losses[-1])
    return Checkpoint(config.language, config, model, epoch_losses[-1], epoch_losses)


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _lp(data: bytes) -> bytes:
    return struct.pack("<I", len(data)) + data


def checkpoint_bytes(ckpt: Checkpoint) -> bytes:
    manifest, blobs, offset = [], [], 0
    for name, p in ckpt.model.params.items():
        blob = np.ascontiguousarray(p, dtype="<f4").tobytes()
        manifest.append({"name": name, "shape": list(p.shape), "offset": offset, "nbytes": len(blob)})
        blobs.append(blob)
        offset += len(blob)
    header = {
        "config": ckpt.config.to_dict(),
        "vocab": list(ckpt.vocab.chars),
        "final_loss": ckpt.final_loss,
        "epoch_losses": list(ckpt.epoch_losses),
        "manifest": manifest,
    }
    body = MAGIC + struct.pack("<I", ckpt.version) + _lp(ckpt.language.encode("utf-8")) \
        + _lp(_canonical_json(header)) + b"".join(blobs)
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    Path(path).write_bytes(checkpoint_bytes(ckpt))


def _read_lp(data: bytes, pos: int) -> tuple[bytes, int]:
    if pos + 4 > len(data):
        raise CheckpointError("truncated checkpoint")
    (n,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if pos + n > len(data):
        raise CheckpointError("truncated checkpoint")
    return data[pos:pos + n], pos + n


def checkpoint_from_bytes(data: bytes) -> Checkpoint:
    if data[:4] != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic bytes)")
    if len(data) < 12:
        raise CheckpointError("truncated checkpoint")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} (expected {FORMAT_VERSION})")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise CheckpointError("checkpoint checksum mismatch (corrupt file)")
    lang, pos = _read_lp(body, 8)
    header_raw, pos = _read_lp(body, pos)
    header = json.loads(header_raw.decode("utf-8"))
    payload = body[pos:]
    config = TrainConfig.from_dict(header["config"])
    model = build_model(CharVocab(tuple(header["vocab"])), config)
    expected = set(model.params)
    for entry in header["manifest"]:
        name, shape, off, nbytes = entry["name"], tuple(entry["shape"]), entry["offset"], entry["nbytes"]
        if name not in expected:
            raise CheckpointError(f"unexpected parameter {name}")
        if off + nbytes > len(payload) or nbytes != 4 * int(np.prod(shape, dtype=np.int64)):
            raise CheckpointError(f"bad manifest entry for {name}")
        arr = np.frombuffer(payload, dtype="<f4", count=nbytes // 4, offset=off).astype(np.float32).reshape(shape)
        model.set_param(name, arr)
        expected.discard(name)
    if expected:
        raise CheckpointError(f"missing parameters: {sorted(expected)}")
    return Checkpoint(lang.decode("utf-8"), config, model, header["final_loss"], header["epoch_losses"], version)


def load_checkpoint(path) -> Checkpoint:
    return checkpoint_from_bytes(Path(path).read_bytes())
