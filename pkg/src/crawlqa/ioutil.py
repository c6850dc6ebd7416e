"""Shared stream helpers: "-" means stdin/stdout, .gz is transparent."""
from __future__ import annotations

import gzip
import sys

__all__ = ["open_text_input", "open_text_output", "open_binary_output"]


class _NoCloseWrapper:
    def __init__(self, handle):
        self._handle = handle

    def __getattr__(self, name):
        return getattr(self._handle, name)

    def __iter__(self):
        return iter(self._handle)

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self._handle.flush()

    def close(self):
        self._handle.flush()


def open_text_input(path):
    if path == "-":
        return _NoCloseWrapper(sys.stdin)
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def open_text_output(path):
    if path == "-":
        return _NoCloseWrapper(sys.stdout)
    if str(path).endswith(".gz"):
        return gzip.open(path, "wt", encoding="utf-8", newline="\n")
    return open(path, "w", encoding="utf-8", newline="\n")


def open_binary_output(path):
    if path == "-":
        return _NoCloseWrapper(sys.stdout.buffer)
    return open(path, "wb")
