"""
Inventory-driven longest-match syllabifier with backtracking
"""

import logging
from typing import List, Optional, Tuple

from app.schemas.schemas import SyllabifiedWord, SyllableInventory

logger = logging.getLogger(__name__)


def build_inventory(train: List[SyllabifiedWord]) -> SyllableInventory:
    """All gold syllables observed in the training words."""
    if not train:
        raise ValueError("cannot build an inventory from an empty training set")
    return SyllableInventory(syllables=frozenset(s for word in train for s in word.syllables))


def _candidates(surface: str, pos: int, inventory: SyllableInventory, max_len: int) -> List[str]:
    """Inventory entries matching at pos, longest first."""
    top = min(max_len, len(surface) - pos)
    return [
        surface[pos:pos + size]
        for size in range(top, 0, -1)
        if surface[pos:pos + size] in inventory.syllables
    ]


def _completable(surface: str, inventory: SyllableInventory, max_len: int) -> List[bool]:
    """done[pos] is True when surface[pos:] splits into inventory entries."""
    n = len(surface)
    done = [False] * (n + 1)
    done[n] = True
    for pos in range(n - 1, -1, -1):
        done[pos] = any(done[pos + len(piece)] for piece in _candidates(surface, pos, inventory, max_len))
    return done


def segment(surface: str, inventory: SyllableInventory) -> Optional[SyllabifiedWord]:
    """
    Longest-match segmentation with backtracking.

    Returns the parse a longest-first depth-first search finds first: at each
    position the longest entry whose remainder still splits completely. None
    when no path covers the surface.
    """
    if not surface:
        raise ValueError("surface must be non-empty")
    max_len = inventory.max_len
    done = _completable(surface, inventory, max_len)
    if not done[0]:
        logger.debug("No segmentation for %r", surface)
        return None

    pieces: List[str] = []
    pos = 0
    while pos < len(surface):
        piece = next(p for p in _candidates(surface, pos, inventory, max_len) if done[pos + len(p)])
        pieces.append(piece)
        pos += len(piece)
    return SyllabifiedWord(syllables=tuple(pieces))


def enumerate_segmentations(
    surface: str, inventory: SyllableInventory, limit: Optional[int] = None
) -> List[Tuple[str, ...]]:
    """Every complete segmentation in longest-first order, optionally capped."""
    if not surface:
        return []
    max_len = inventory.max_len
    done = _completable(surface, inventory, max_len)
    found: List[Tuple[str, ...]] = []
    if not done[0]:
        return found

    # (position, pieces so far); shortest candidates pushed first so the longest pops first
    stack: List[Tuple[int, Tuple[str, ...]]] = [(0, ())]
    while stack:
        pos, acc = stack.pop()
        if pos == len(surface):
            found.append(acc)
            if limit is not None and len(found) >= limit:
                break
            continue
        for piece in reversed(_candidates(surface, pos, inventory, max_len)):
            if done[pos + len(piece)]:
                stack.append((pos + len(piece), acc + (piece,)))
    return found


def count_segmentations(surface: str, inventory: SyllableInventory, cap: Optional[int] = None) -> int:
    """Number of complete segmentations, saturating at `cap`."""
    if not surface:
        return 0
    max_len = inventory.max_len
    n = len(surface)
    ways = [0] * (n + 1)
    ways[n] = 1
    for pos in range(n - 1, -1, -1):
        total = sum(ways[pos + len(piece)] for piece in _candidates(surface, pos, inventory, max_len))
        ways[pos] = min(total, cap) if cap is not None else total
    return ways[0]


def is_ambiguous(surface: str, inventory: SyllableInventory) -> bool:
    """More than one complete segmentation exists."""
    return count_segmentations(surface, inventory, cap=2) > 1
