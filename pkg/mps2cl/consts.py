LOGGER_NAME = 'mps2cl'
PROG_NAME = 'mps2cl'
VERSION = '0.3.0'

ENV_OUTPUT_DIR = 'MPS2CL_OUTPUT_DIR'
ENV_WORKERS = 'MPS2CL_WORKERS'

# kernel/rank decisions everywhere route through RANK_TOL
RANK_TOL = 1e-10
HERMITIAN_TOL = 1e-12
CHECK_TOL = 1e-10
KERNEL_TOL = 1e-8
DEGENERACY_TOL = 1e-8
KRYLOV_TOL = 1e-9

DENSE_LIMIT = 4096
SPARSE_LIMIT = 2 ** 20
PRODUCT_CAP = 4096
STATE_CAP = 2 ** 20
G1_DEFAULT_CAP = 8
