VERSION = "0.1.0"

EVEN = 0
ODD = 1

DEFAULT_DELAY = 0.2
LOOP_DELAY = 0.1

DEFAULT_NIL_ORDER = 3
DEFAULT_TWIN_CAP = 8
DEFAULT_INTERNAL_CAP = 4
DEFAULT_MAX_BASIS_SIZE = 20000
DEFAULT_SEED = 0

# tau(d eta) = CHAIN_MAP_SIGN * d_L tau(eta) with dt stored rightmost
CHAIN_MAP_SIGN = 1

SCRIPT_SUFFIX = ".sl"
LAMBDA = "lambda"
LOOP_PARAMETER = "t"
