"""Named constants for the statistical extractors.

Both methods are described qualitatively in most write-ups; the exact
numbers below follow their original publications and are collected here so
any divergence from a reference implementation is auditable in one place.
"""

# YAKE -----------------------------------------------------------------
# Co-occurrence window (in non-stopword tokens, same sentence) used for
# the left/right dispersion feature.
YAKE_WINDOW = 1
# Longest candidate n-gram.
YAKE_NGRAM_MAX = 3
# Candidates whose Levenshtein ratio to an already kept candidate reaches
# this value are dropped during de-duplication.
YAKE_DEDUP_THRESHOLD = 0.9

# KPMiner --------------------------------------------------------------
# Least allowable seen frequency: candidates seen fewer times are dropped.
KPMINER_LASF = 3
# Candidates first appearing after this many words are dropped.
KPMINER_CUTOFF = 400
# Multi-word boost = min(#candidates / (DENOM * #multi-word candidates), CAP).
KPMINER_BOOST_DENOMINATOR = 2.3
KPMINER_BOOST_CAP = 3.0
