"""
Conditional entropy rates
=========================

H(X|Y) is estimated as the LZ rate of the pair sequence minus the LZ rate of
Y.  Side information that really drives X lowers the estimate; unrelated
side information leaves it roughly where it was.  The estimate is never
clamped, so at finite n it can land slightly above H(X) or below zero.
"""

import numpy as np

from predictability import (
    CategoricalSequence,
    conditional_lz_rate,
    gen_markov,
    lz_rate,
    stay_matrix,
)

n = 50_000
rng = np.random.default_rng(0)

# Y: a "location" that changes slowly.
place = gen_markov(stay_matrix(0.95, 3), n, seed=1)

# X: the partner.  At each location one partner is likely, the rest rare.
favourite = np.array([0, 1, 2])
noise = rng.integers(0, 6, n)
partner_codes = np.where(rng.random(n) < 0.8, favourite[place.codes], noise)
partner = CategoricalSequence.from_codes(partner_codes, 6)

# An unrelated conditioner with the same dynamics as place.
unrelated = gen_markov(stay_matrix(0.95, 3), n, seed=2)

print("H(partner)               %.3f" % lz_rate(partner))
print("H(partner | place)       %.3f" % conditional_lz_rate(partner, place))
print("H(partner | unrelated)   %.3f" % conditional_lz_rate(partner, unrelated))
print("H(partner | partner)     %.3f" % conditional_lz_rate(partner, partner))
