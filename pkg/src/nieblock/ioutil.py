"""Small file-output helpers: atomic writes and deterministic JSON.

Every artifact the package writes (stats caches, datasets, models, solutions,
reports) goes through atomic_write_text so a crash never leaves a partial
file, and through dumps_deterministic so reruns with the same inputs produce
byte-identical files.
"""

import json
import os
import tempfile


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temp file in the same directory + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def dumps_deterministic(obj) -> str:
    """JSON with stable key order and lossless float round-trip.

    json emits floats with repr, which is already the shortest exact
    representation in Python 3; sort_keys pins the key order.
    """
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, allow_nan=False)
