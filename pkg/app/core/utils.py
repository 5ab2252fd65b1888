"""
Core Utilities
"""
import re
from typing import List, Tuple

from app.core.exceptions import BadSubsetError

_PAIR_PATTERN = re.compile(r"\(\s*(\d+)\s*[-:,]\s*(\d+)\s*\)|(\d+)\s*[-:]\s*(\d+)")
_PAIR_SEPARATORS = " \t,;"


class IndexParser:
    """
    Parses qubit index lists typed on the command line.

    Accepted forms:
    - Subsets: "1,2,3", "1 2 3", "{1, 3}"
    - Pairs: "1-2,1-3,1-4", "(1,2);(1,3)"

    Indices are 1-based everywhere in the public surface; qubit 1 is the
    most significant bit of the amplitude index.
    """

    @staticmethod
    def parse_subset(text: str) -> List[int]:
        """
        Convert a loose subset string to a sorted list of distinct indices.

        Args:
            text: Raw subset string (e.g. " {1, 3 ,2}")

        Returns:
            Strictly increasing list of 1-based indices

        Raises:
            BadSubsetError: If no index is present or an index repeats
        """
        # 1. Keep only digit runs
        tokens = re.findall(r"\d+", str(text))
        if not tokens:
            raise BadSubsetError(f"no qubit indices in {text!r}")

        indices = [int(t) for t in tokens]
        if len(set(indices)) != len(indices):
            raise BadSubsetError(f"repeated qubit index in {text!r}")

        return sorted(indices)

    @staticmethod
    def parse_pairs(text: str) -> List[Tuple[int, int]]:
        """
        Convert a pair list string to a list of index pairs.

        A pair is "i-j", "i:j" or "(i,j)"; pairs are separated by commas,
        semicolons or whitespace. Anything else, including a bare "1,2,3,4"
        or a trailing unpaired index, is rejected.

        Args:
            text: Raw pair string (e.g. "1-2,1-3,1-4")

        Returns:
            List of (i, j) tuples with i < j, in input order

        Raises:
            BadSubsetError: On text outside the pair grammar or a repeated qubit
        """
        text = str(text)
        pairs = []
        position = 0
        for match in _PAIR_PATTERN.finditer(text):
            if text[position:match.start()].strip(_PAIR_SEPARATORS) or (pairs and match.start() == position):
                raise BadSubsetError(f"unreadable pair list {text!r}")
            a, b = match.group(1) or match.group(3), match.group(2) or match.group(4)
            i, j = int(a), int(b)
            if i == j:
                raise BadSubsetError(f"pair ({i}, {j}) repeats a qubit")
            pairs.append((min(i, j), max(i, j)))
            position = match.end()

        if text[position:].strip(_PAIR_SEPARATORS):
            raise BadSubsetError(f"unreadable pair list {text!r}")
        if not pairs and text.strip():
            raise BadSubsetError(f"no qubit pairs in {text!r}")

        return pairs
