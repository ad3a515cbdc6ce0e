"""Run deeply recursive tree code on a thread with a large C stack.

Obfuscated scripts routinely contain string concatenations thousands of
operands long, which become left-deep trees.  The main thread's 8 MB stack
cannot hold that much Python recursion, so the public entry points hop onto
a worker thread with a big stack (once; nested calls run inline).
"""

from __future__ import annotations

import functools
import sys
import threading

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 1_000_000

_local = threading.local()
_size_lock = threading.Lock()


def deep_recursion(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        if getattr(_local, "deep", False):
            return fn(*args, **kwargs)
        result = {}

        def target():
            _local.deep = True
            try:
                result["value"] = fn(*args, **kwargs)
            except BaseException as exc:  # re-raised on the calling thread
                result["error"] = exc

        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)
        with _size_lock:
            old = threading.stack_size(STACK_BYTES)
            try:
                t = threading.Thread(target=target, name=f"deep-{fn.__name__}")
                t.start()
            finally:
                threading.stack_size(old)
        t.join()
        if "error" in result:
            raise result["error"]
        return result["value"]

    return wrapper
