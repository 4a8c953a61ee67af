"""Synthetic CelebA-shaped attribute data for tests and experiment scripts."""

from __future__ import annotations

import numpy as np

from .attribute_db import AttributeDatabase

CELEBA_ATTRIBUTES = (
    "5_o_Clock_Shadow Arched_Eyebrows Attractive Bags_Under_Eyes Bald Bangs Big_Lips "
    "Big_Nose Black_Hair Blond_Hair Blurry Brown_Hair Bushy_Eyebrows Chubby Double_Chin "
    "Eyeglasses Goatee Gray_Hair Heavy_Makeup High_Cheekbones Male Mouth_Slightly_Open "
    "Mustache Narrow_Eyes No_Beard Oval_Face Pale_Skin Pointy_Nose Receding_Hairline "
    "Rosy_Cheeks Sideburns Smiling Straight_Hair Wavy_Hair Wearing_Earrings Wearing_Hat "
    "Wearing_Lipstick Wearing_Necklace Wearing_Necktie Young"
).split()

# Attributes studied in the experiments: two local, three global.
PAPER_ATTRIBUTES = ("Bangs", "Blond_Hair", "Male", "Pale_Skin", "Young")


def random_database(n: int, names=CELEBA_ATTRIBUTES, rate=0.5, seed: int = 0) -> AttributeDatabase:
    """Independent Bernoulli(rate) attributes; ``rate`` may be per-attribute."""
    rng = np.random.default_rng(seed)
    rate = np.broadcast_to(np.asarray(rate, dtype=float), (len(names),))
    bits = (rng.random((n, len(names))) < rate).astype(np.uint8)
    ids = [f"{i + 1:06d}.jpg" for i in range(n)]
    return AttributeDatabase(tuple(names), ids, bits)


def exact_frequency_database(n: int, pi: float, name: str = "A", seed: int = 0) -> AttributeDatabase:
    """Single attribute with exactly ``round(pi * n)`` ones in shuffled order."""
    ones = int(round(pi * n))
    col = np.zeros(n, dtype=np.uint8)
    col[:ones] = 1
    np.random.default_rng(seed).shuffle(col)
    return AttributeDatabase((name,), [f"r{i}" for i in range(n)], col[:, None])


def celeba_text(db: AttributeDatabase) -> str:
    """Render ``db`` in the CelebA annotation layout (two-space separators)."""
    lines = [str(len(db)), " ".join(db.names)]
    signed = np.where(db.bits == 1, " 1", "-1")
    for rid, row in zip(db.record_ids, signed):
        lines.append(rid + " " + " ".join(row))
    return "\n".join(lines) + "\n"
