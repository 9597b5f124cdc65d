"""Central tolerance table shared by every module and the test suite."""

#: transforms vs. the quadratic-time sum, relative to the sup of the reference
TRANSFORM_REL = 1e-9
#: round trips, per entry, absolute
ROUNDTRIP_ABS = 1e-9
#: derived identities (Plancherel, convolution identity)
IDENTITY = 1e-8
#: exact-arithmetic identities evaluated in floating point (sums, means)
EXACT = 1e-9
#: negative values this small are floating noise in nonnegative results
NEG_NOISE = 1e-9
#: relative slack for the restriction-chain inequalities
CHAIN_REL = 1e-9
#: l2 error on Bohr sets vs. direct sum, relative
L2_BOHR_REL = 1e-6
