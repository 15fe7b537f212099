"""Per-component seed derivation.

Every random draw in an experiment comes from ``derive_seed(seed, label)``
so that adding a component never perturbs the streams of the others.
"""

import hashlib


def derive_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")
