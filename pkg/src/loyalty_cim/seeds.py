import hashlib


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from any sequence of printable parts."""
    h = hashlib.blake2b("\x1f".join(map(str, parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big") >> 1
