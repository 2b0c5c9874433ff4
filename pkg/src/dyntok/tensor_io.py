"""Reading and writing float32 token tensors in the ``.npy`` v1.0 container.

The writer emits exactly one header per shape (no growth padding), so writing
the same tensor twice yields identical bytes. The reader accepts any
well-formed v1.0 file whose payload is little-endian float32 in C order.
"""

from __future__ import annotations

import ast
import json
import math
import os
import struct
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from dyntok.errors import (
    MetaMissingError,
    TensorDtypeError,
    TensorFormatError,
    TensorLengthError,
    ValidationError,
)

MAGIC = b"\x93NUMPY"
VERSION = b"\x01\x00"
DESCR = "<f4"
ALIGN = 64
META_SUFFIX = ".meta.json"


@dataclass(frozen=True)
class TensorFile:
    """Shape plus a flat row-major float32 payload."""

    shape: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if any(s < 0 for s in shape):
            raise ValidationError(f"negative dimension in shape {shape}")
        data = np.asarray(self.data)
        if data.dtype != np.float32:
            raise ValidationError(f"data must be float32, got {data.dtype}")
        data = data.reshape(-1)
        if math.prod(shape) != data.size:
            raise ValidationError(
                f"shape {shape} holds {math.prod(shape)} values but {data.size} were given"
            )
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array) -> "TensorFile":
        array = np.asarray(array, dtype=np.float32, order="C")
        return cls(array.shape, array.reshape(-1))

    def array(self) -> np.ndarray:
        return self.data.reshape(self.shape)

    def __eq__(self, other):
        if not isinstance(other, TensorFile):
            return NotImplemented
        return self.shape == other.shape and self.data.tobytes() == other.data.tobytes()


def _header(shape: tuple[int, ...]) -> bytes:
    if len(shape) == 1:
        shape_repr = f"({shape[0]},)"
    else:
        shape_repr = "(" + ", ".join(str(s) for s in shape) + ")"
    text = f"{{'descr': '{DESCR}', 'fortran_order': False, 'shape': {shape_repr}, }}"
    prefix = len(MAGIC) + len(VERSION) + 2
    # +1 for the terminating newline
    pad = -(prefix + len(text) + 1) % ALIGN
    text = text + " " * pad + "\n"
    if len(text) > 0xFFFF:
        raise ValidationError("shape too large for a v1.0 header")
    return MAGIC + VERSION + struct.pack("<H", len(text)) + text.encode("latin1")


def encode_tensor(t: TensorFile) -> bytes:
    return _header(t.shape) + t.data.astype("<f4", copy=False).tobytes(order="C")


def decode_tensor(buf: bytes) -> TensorFile:
    if len(buf) < 10 or buf[:6] != MAGIC:
        raise TensorFormatError("missing .npy magic bytes")
    if buf[6:8] != VERSION:
        raise TensorFormatError(f"unsupported container version {buf[6]}.{buf[7]}")
    (hlen,) = struct.unpack("<H", buf[8:10])
    if len(buf) < 10 + hlen:
        raise TensorFormatError("header truncated")
    raw = buf[10 : 10 + hlen]
    try:
        header = ast.literal_eval(raw.decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise TensorFormatError(f"unparseable header: {raw!r}") from exc
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise TensorFormatError(f"header must have exactly descr/fortran_order/shape: {header!r}")
    if header["descr"] != DESCR:
        raise TensorDtypeError(f"only '{DESCR}' payloads are supported, got {header['descr']!r}")
    if header["fortran_order"] is not False:
        raise TensorFormatError("fortran_order payloads are not supported")
    shape = header["shape"]
    if not isinstance(shape, tuple) or not all(
        isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in shape
    ):
        raise TensorFormatError(f"bad shape {shape!r}")
    payload = buf[10 + hlen :]
    expected = math.prod(shape) * 4
    if len(payload) != expected:
        raise TensorLengthError(
            f"shape {shape} needs {expected} payload bytes, file has {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").astype(np.float32, copy=True)
    return TensorFile(shape, data)


def read_tensor(path: str | os.PathLike) -> TensorFile:
    return decode_tensor(Path(path).read_bytes())


def write_tensor(t: TensorFile, path: str | os.PathLike) -> None:
    if not isinstance(t, TensorFile):
        t = TensorFile.from_array(t)
    Path(path).write_bytes(encode_tensor(t))


@dataclass(frozen=True)
class TokenMeta:
    """Sidecar describing how a token tensor maps onto the patch grid."""

    grid_h: int
    grid_w: int
    num_frames: int
    feature_dim: int

    def __post_init__(self):
        if self.grid_h < 1 or self.grid_w < 1:
            raise ValidationError(f"grid must be positive, got {self.grid_h}x{self.grid_w}")
        if self.num_frames < 0:
            raise ValidationError("num_frames must be >= 0")
        if self.feature_dim < 1:
            raise ValidationError("feature_dim must be >= 1")

    @property
    def tokens_per_frame(self) -> int:
        return self.grid_h * self.grid_w

    def expected_shape(self) -> tuple[int, ...]:
        if self.num_frames == 0:
            return (self.tokens_per_frame, self.feature_dim)
        return (self.num_frames, self.tokens_per_frame, self.feature_dim)

    def check(self, shape) -> None:
        if tuple(shape) != self.expected_shape():
            raise ValidationError(
                f"tensor shape {tuple(shape)} does not match metadata {self.expected_shape()}"
            )

    @classmethod
    def from_dict(cls, d: dict) -> "TokenMeta":
        try:
            return cls(
                grid_h=_as_int(d["grid_h"]),
                grid_w=_as_int(d["grid_w"]),
                num_frames=_as_int(d["num_frames"]),
                feature_dim=_as_int(d["feature_dim"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed metadata: {d!r}") from exc


def _as_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError(f"expected int, got {v!r}")
    return v


def meta_path(tensor_path: str | os.PathLike) -> Path:
    return Path(str(tensor_path) + META_SUFFIX)


def read_meta(tensor_path: str | os.PathLike) -> TokenMeta:
    path = meta_path(tensor_path)
    if not path.exists():
        raise MetaMissingError(f"no metadata sidecar at {path}")
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"sidecar {path} is not valid JSON") from exc
    if not isinstance(d, dict):
        raise ValidationError(f"sidecar {path} must hold a JSON object")
    return TokenMeta.from_dict(d)


def write_meta(meta: TokenMeta, tensor_path: str | os.PathLike) -> None:
    meta_path(tensor_path).write_text(json.dumps(asdict(meta)) + "\n")


def load_tokens(path: str | os.PathLike) -> tuple[np.ndarray, TokenMeta]:
    """Read a token tensor with its sidecar and check they agree."""
    meta = read_meta(path)
    t = read_tensor(path)
    meta.check(t.shape)
    return t.array(), meta
