"""boxcert: ReLU networks whose interval propagation brackets a target range.

The package has five layers: interval arithmetic (``intervals``), a network IR
with concrete/abstract evaluation (``network``, ``netio``), expression parsing
with certified Lipschitz bounds and a sampling oracle (``expr``, ``oracle``),
the constructive builder (``slicing``, ``grids``, ``gadgets``, ``construct``),
and the verification harness plus CLI (``verify``, ``cli``, ``fixtures``).
"""

from .construct import (
    BuildBudget,
    BuildBudgetError,
    BuildReport,
    build_certified_network,
    build_slice_network,
    build_vector_valued,
    choose_grid_resolution,
    enumerate_delta_k,
    grid_resolution,
)
from .expr import FuncExpr, ParseError, parse_expr, parse_func, to_source
from .fixtures import FIXTURES, fig2_n1, fig2_n2
from .gadgets import build_clip_above, build_local_bump, build_nmin2, build_nmin_n
from .grids import GridSpec, HyperRect
from .intervals import (
    BoxRegion,
    Interval,
    box_contains,
    box_subset,
    iv_add,
    iv_affine_row,
    iv_clip_above,
    iv_contains,
    iv_neg,
    iv_relu,
    iv_scale,
    iv_subset,
    nmin2_closed_form,
)
from .netio import NetworkFormatError, deserialize, load, save, serialize
from .network import (
    Network,
    NetworkBuilder,
    affine_post,
    affine_pre,
    compose,
    concat_outputs,
    constant_shift,
    eval_abstract,
    eval_concrete,
    identity_network,
    stats,
    sum_outputs,
)
from .oracle import CertifiedBound, OracleBudgetError, certified_box_max, certified_box_min
from .slicing import SliceSpec, make_slice_spec, slice_eval
from .verify import RunConfig, VerificationReport, verify_network

__version__ = "0.1.0"
