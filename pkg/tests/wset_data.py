"""Frozen removed-vertex octets known to admit a perfect matching of the
punctured torus, one per divisibility case.

Found by exhaustive lexicographic candidate search with a per-candidate
matching check; frozen so the extension tests have a deterministic
success path.
"""

EXTENDABLE_TUPLES = {
    27: ((1, 2, 9, 21, 16, 5, 8, 24),
         (7, 4, 20, 18, 22, 14, 6, 25),
         (10, 3, 23, 17, 27, 15, 11, 26)),
    28: ((1, 2, 5, 26, 15, 3, 8, 24),
         (4, 10, 22, 20, 21, 12, 9, 28),
         (7, 6, 23, 18, 27, 13, 11, 25)),
    30: ((1, 2, 3, 30, 14, 8, 5, 29),
         (4, 10, 20, 24, 25, 16, 7, 28),
         (6, 9, 23, 22, 27, 12, 11, 26)),
}
