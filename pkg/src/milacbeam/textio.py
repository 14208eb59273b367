"""Plain-text serialization of complex arrays.

The format is deliberately binary-free so dumps can be diffed and consumed
by other implementations: a one-line header ``<name> <dim0> <dim1> ...``
followed by the entries in row-major order, one complex literal per
whitespace-separated token (e.g. ``0.5-0.25j``). Floats are written with 17
significant digits, so a dump/load round trip is exact.
"""

import numpy as np


def format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def dump_complex_array(path, name: str, arr: np.ndarray) -> None:
    arr = np.asarray(arr, dtype=complex)
    with open(path, "w") as fh:
        fh.write(name + " " + " ".join(str(d) for d in arr.shape) + "\n")
        flat = arr.reshape(-1, arr.shape[-1]) if arr.ndim > 1 else arr.reshape(1, -1)
        for row in flat:
            fh.write(" ".join(format_complex(z) for z in row) + "\n")


def load_complex_array(path, expected_name: str | None = None) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if not header:
            raise ValueError(f"{path}: empty dump file")
        name, dims = header[0], header[1:]
        if expected_name is not None and name != expected_name:
            raise ValueError(f"{path}: expected a '{expected_name}' dump, found '{name}'")
        try:
            shape = tuple(int(d) for d in dims)
        except ValueError as exc:
            raise ValueError(f"{path}: malformed header dimensions {dims}") from exc
        tokens = fh.read().split()
    count = int(np.prod(shape)) if shape else 0
    if len(tokens) != count:
        raise ValueError(f"{path}: expected {count} entries, found {len(tokens)}")
    data = np.array([complex(tok) for tok in tokens], dtype=complex)
    return data.reshape(shape)
