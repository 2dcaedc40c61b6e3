"""
Lempel-Ziv entropy rates on sequences with known answers
========================================================

The LZ estimator needs no model: it only looks at how long the novel
substrings are at each position.  Here we check it against processes whose
entropy rate is known in closed form.
"""


from predictability import (
    CategoricalSequence,
    EmpiricalDistribution,
    analytic_markov_rate,
    gen_iid,
    gen_markov,
    gen_periodic,
    iid_rate,
    lz_rate,
    match_lengths,
    stay_matrix,
)

# A tiny example first.  For "aab" the novel-substring lengths are 1, 2, 1.
aab = CategoricalSequence.from_codes([0, 0, 1])
print("match lengths of aab:", match_lengths(aab).tolist())
print("LZ rate of aab: %.6f" % lz_rate(aab))

# Fair coin flips: one bit per symbol.
coin = gen_iid(EmpiricalDistribution([0.5, 0.5]), 100_000, seed=0)
print("\nfair coin      LZ %.3f   iid %.3f   true 1.000" % (lz_rate(coin), iid_rate(coin)))

# A sticky two-state chain.  Its marginal is still 50/50, so the iid
# baseline sees one full bit, but the chain only produces ~0.47 bits.
P = stay_matrix(0.9)
sticky = gen_markov(P, 100_000, seed=0)
print("sticky chain   LZ %.3f   iid %.3f   true %.3f"
      % (lz_rate(sticky), iid_rate(sticky), analytic_markov_rate(P)))

# Larger alphabets converge too.
for k in (3, 5, 8):
    P = stay_matrix(0.7, k)
    s = gen_markov(P, 100_000, seed=k)
    print("stay-0.7, K=%d  LZ %.3f   true %.3f" % (k, lz_rate(s), analytic_markov_rate(P)))

# A periodic sequence carries no information per symbol in the limit.
periodic = gen_periodic(CategoricalSequence.from_codes([0, 1, 2]), 10_000)
print("\nperiodic       LZ %.4f" % lz_rate(periodic))

# Convergence is slow: the estimate drifts toward the truth as n grows.
P = stay_matrix(0.9)
long = gen_markov(P, 100_000, seed=1)
for n in (100, 1_000, 10_000, 100_000):
    print("n=%6d  LZ %.3f" % (n, lz_rate(long[:n])))
print("analytic       %.3f" % analytic_markov_rate(P))
