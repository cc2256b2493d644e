CSV_FLOAT_FORMAT = "%.6g"
THETA_FLOAT_FORMAT = "%.17g"

BREAKDOWN_RTOL = 1e-12

# central difference step is FD_STEP * (1 + |x|)
FD_STEP = 1e-6

RNG_NAME = "numpy.PCG64"

DEFAULT_THETA_SCALE = 0.1

# a reference channel whose spread is below DEGENERATE_SPREAD_ULPS * eps * sqrt(N) * max|ref| is constant
DEGENERATE_SPREAD_ULPS = 16.0
