# ccme/utils.py
import os
import tempfile
import zlib
from contextlib import contextmanager

import numpy as np

from ccme.errors import OutputError


@contextmanager
def atomic_write(path, mode='w'):
    """Yield a temp file next to ``path``; rename it over ``path`` on success."""
    folder = os.path.dirname(os.path.abspath(path))
    try:
        if not os.path.exists(folder):
            os.makedirs(folder)  # create the output directory if missing
        fd, tmp_path = tempfile.mkstemp(dir=folder, prefix='.tmp-', suffix=os.path.basename(path))
    except OSError as exc:
        raise OutputError(f'cannot write {path}: {exc}') from exc

    try:
        with os.fdopen(fd, mode) as handle:
            yield handle
        # mkstemp opens owner-only; give the result the mode a plain open() would
        os.chmod(tmp_path, 0o666 & ~current_umask())
        os.replace(tmp_path, path)
    except OSError as exc:
        _discard(tmp_path)
        raise OutputError(f'cannot write {path}: {exc}') from exc
    except BaseException:
        _discard(tmp_path)
        raise


def current_umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def _discard(tmp_path):
    if os.path.exists(tmp_path):
        os.remove(tmp_path)


def derive_seed(*keys):
    """Stable 32-bit seed from ints and strings, identical across processes."""
    entropy = [k if isinstance(k, (int, np.integer)) else zlib.crc32(str(k).encode()) for k in keys]
    return int(np.random.SeedSequence([int(e) for e in entropy]).generate_state(1)[0])
