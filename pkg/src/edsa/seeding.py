"""Per-module seeds derived from one root seed."""
from __future__ import annotations

import hashlib


def derive_seed(root: int, label: str) -> int:
    """Stable 63-bit seed for ``label``: the same (root, label) always gives the same value."""
    digest = hashlib.sha256(f"{int(root)}/{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & (2**63 - 1)
