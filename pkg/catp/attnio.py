"""
CATP-ATTN v1 reader and writer, plus normalization checks and layer slicing.

On-disk layout, little-endian throughout:

    bytes  0..4   magic b"CATP"
    bytes  4..8   version, u32 (1)
    bytes  8..12  kind, u32 (0 cross-attention, 1 self-attention, 2 embeddings)
    bytes 12..28  four u32 dims (L, h, L0, L1 / L, h, N, N / 1, 1, n_tokens, d)
    bytes 28..    f32 payload, row-major in the declared axis order
"""

import os
import struct
import tempfile
from math import prod
from pathlib import Path
from typing import List, Optional, Tuple, TypeVar, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict

from catp.config import FORMAT_MAGIC, FORMAT_VERSION, HEADER_SIZE
from catp.domain.base import TensorKind
from catp.domain.scores import LayerSelection
from catp.domain.tensors import TENSOR_TYPES, AttnTensor, EmbeddingMatrix, SelfAttnTensor
from catp.exceptions import (
    BadMagicError,
    FileOperationError,
    FormatError,
    InvalidInputError,
    KindMismatchError,
    NonFiniteValueError,
    NormalizationError,
    TrailingBytesError,
    TruncatedPayloadError,
    UnsupportedVersionError,
)

AnyTensor = Union[AttnTensor, SelfAttnTensor, EmbeddingMatrix]
Normalized = TypeVar("Normalized", AttnTensor, SelfAttnTensor)

_HEADER = struct.Struct("<4sII4I")
_PAYLOAD_DTYPE = np.dtype("<f4")

assert _HEADER.size == HEADER_SIZE


class TensorHeader(BaseModel):
    """Decoded fixed-size header of a CATP-ATTN file."""

    model_config = ConfigDict(frozen=True)

    version: int
    kind: TensorKind
    dims: Tuple[int, int, int, int]

    @property
    def payload_size(self) -> int:
        return prod(self.dims) * _PAYLOAD_DTYPE.itemsize


def encode_header(kind: TensorKind, dims: Tuple[int, int, int, int]) -> bytes:
    return _HEADER.pack(FORMAT_MAGIC, FORMAT_VERSION, int(kind), *dims)


def decode_header(raw: bytes) -> TensorHeader:
    if len(raw) < len(FORMAT_MAGIC) or raw[: len(FORMAT_MAGIC)] != FORMAT_MAGIC:
        raise BadMagicError("Not a CATP file (bad magic)")
    if len(raw) < HEADER_SIZE:
        raise TruncatedPayloadError(
            f"Header is {len(raw)} bytes, expected {HEADER_SIZE}"
        )
    _, version, kind, *dims = _HEADER.unpack(raw[:HEADER_SIZE])
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"Unsupported CATP format version {version} (this build reads {FORMAT_VERSION})"
        )
    try:
        tensor_kind = TensorKind(kind)
    except ValueError:
        raise FormatError(f"Unknown tensor kind {kind}")
    if any(size < 1 for size in dims):
        raise FormatError(f"Dimensions must all be >= 1, got {tuple(dims)}")
    if tensor_kind == TensorKind.EMBEDDING and dims[:2] != [1, 1]:
        raise FormatError(f"Embedding dims must start with (1, 1), got {tuple(dims)}")
    if tensor_kind == TensorKind.SELF and dims[2] != dims[3]:
        raise FormatError(f"Self-attention dims must be square, got {tuple(dims)}")
    return TensorHeader(version=version, kind=tensor_kind, dims=tuple(dims))


def read_header(path: Union[str, Path]) -> TensorHeader:
    """Decode only the header, without touching the payload."""
    try:
        with open(path, "rb") as handle:
            raw = handle.read(HEADER_SIZE)
    except OSError as e:
        raise FileOperationError(f"Cannot read {path}: {e}") from e
    return decode_header(raw)


def read_tensor(
    path: Union[str, Path], expect: Optional[TensorKind] = None
) -> AnyTensor:
    """
    Read a CATP-ATTN file into the container matching its kind.

    Args:
        path: File to read.
        expect: When given, the kind the caller needs; any other kind raises
            KindMismatchError.

    Returns:
        AttnTensor, SelfAttnTensor or EmbeddingMatrix.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise FileOperationError(f"Cannot read {path}: {e}") from e

    header = decode_header(raw)
    if expect is not None and header.kind != expect:
        raise KindMismatchError(
            f"{path} holds {header.kind.name.lower()} data, expected {expect.name.lower()}"
        )

    payload = raw[HEADER_SIZE:]
    if len(payload) < header.payload_size:
        raise TruncatedPayloadError(
            f"{path}: payload is {len(payload)} bytes, dims {header.dims} need {header.payload_size}"
        )
    if len(payload) > header.payload_size:
        raise TrailingBytesError(
            f"{path}: payload is {len(payload)} bytes, dims {header.dims} need {header.payload_size}"
        )

    values = np.frombuffer(payload, dtype=_PAYLOAD_DTYPE)
    if not np.isfinite(values).all():
        raise NonFiniteValueError(f"{path} contains NaN or infinity")

    shape = header.dims[2:] if header.kind == TensorKind.EMBEDDING else header.dims
    logger.debug(f"Read {header.kind.name.lower()} tensor {header.dims} from {path}")
    return TENSOR_TYPES[header.kind](data=values.reshape(shape))


def encode_tensor(tensor: AnyTensor) -> bytes:
    if not np.isfinite(tensor.data).all():
        raise NonFiniteValueError("Refusing to write a tensor with NaN or infinity")
    payload = np.ascontiguousarray(tensor.data, dtype=_PAYLOAD_DTYPE).tobytes()
    return encode_header(tensor.kind, tensor.dims) + payload


def _default_file_mode() -> int:
    # os.umask can only be read by setting it
    umask = os.umask(0)
    os.umask(umask)
    return 0o666 & ~umask


def write_bytes_atomic(path: Union[str, Path], content: bytes) -> None:
    """Write to a temporary sibling and rename over the target."""
    target = Path(path)
    try:
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(content)
            # mkstemp creates 0600; match what open() would have given
            os.chmod(tmp_name, _default_file_mode())
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
    except OSError as e:
        raise FileOperationError(f"Cannot write {path}: {e}") from e


def write_tensor(tensor: AnyTensor, path: Union[str, Path]) -> None:
    """Write a tensor in the CATP-ATTN v1 layout; equal tensors give identical bytes."""
    content = encode_tensor(tensor)
    write_bytes_atomic(path, content)
    logger.debug(f"Wrote {tensor.kind.name.lower()} tensor {tensor.dims} to {path}")


def validate_normalization(
    tensor: Union[AttnTensor, SelfAttnTensor], tol: float
) -> List[Tuple[int, int, int]]:
    """
    Find rows whose last-axis sum is not 1 within tol.

    Cross-attention rows are normalized over image tokens and self-attention
    rows over receivers; both are the last axis. Sums are taken in float64.

    Returns:
        (layer, head, row) triples in lexicographic order; empty when clean.
    """
    if not tol > 0:
        raise InvalidInputError(f"Tolerance must be > 0, got {tol}")
    sums = tensor.data.astype(np.float64).sum(axis=-1)
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    return [(int(layer), int(head), int(row)) for layer, head, row in bad]


def check_normalization(tensor: Normalized, tol: float) -> Normalized:
    """Strict mode: raise NormalizationError unless every row sums to 1."""
    violations = validate_normalization(tensor, tol)
    if violations:
        preview = ", ".join(str(v) for v in violations[:5])
        raise NormalizationError(
            f"{len(violations)} row(s) do not sum to 1 within {tol}: {preview}"
        )
    return tensor


def slice_layers(tensor: Normalized, sel: LayerSelection) -> Normalized:
    """Keep only the selected layers, in ascending original order."""
    if sel.variant == "all":
        return tensor
    indices = sel.resolve(tensor.data.shape[0])
    return type(tensor)(data=tensor.data[indices])
