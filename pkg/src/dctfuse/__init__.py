"""Multi-focus grayscale image fusion in the 8x8 DCT block domain."""

from .blocks import (
    BLOCK_SIZE,
    DERIVATIVE_KERNEL,
    DimensionError,
    assemble_image,
    build_derivative_kernel,
    dct2_forward,
    dct2_inverse,
    partition_blocks,
)
from .fusion import (
    MEASURES,
    FusionConfig,
    FusionResult,
    consistency_verify,
    decision_map,
    format_map,
    fuse_multi,
    fuse_pair,
    fusion_stages,
    select_blocks,
)
from .harness import (
    BenchReport,
    BenchRow,
    bench_triples,
    convolve,
    disk_kernel,
    make_split_focus_pair,
    parse_method,
    run_benchmark,
    synthetic_image,
    time_per_block,
)
from .measures import (
    SpatialSmlParams,
    ac_max,
    ml_spatial,
    sml_dct,
    sml_spatial,
    sml_spatial_map,
    variance_dct,
)
from .metrics import MetricsReport, mutual_information, petrovic_qabf, ssim
from .pgm import (
    PgmDataError,
    PgmError,
    PgmHeaderError,
    PgmMagicError,
    PgmMaxvalError,
    quantize_u8,
    read_image,
    write_image,
)

__version__ = "0.1.0"
