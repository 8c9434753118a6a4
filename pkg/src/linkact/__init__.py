"""Maximum-weight concurrent link activation under the physical SINR model,
with single-user, parallel, single-link, and successive interference
cancellation at the receivers."""

__version__ = "0.1.0"

from .feasibility import (  # noqa: F401
    MarginTable,
    Scheme,
    SchemeConfig,
    Solution,
    Verdict,
    check,
    check_pic,
    check_sic,
    check_slic,
    check_sud,
    margins,
    pic_cancel_sets,
    sic_saturate_receiver,
    verify_solution,
)
from .instance import (  # noqa: F401
    Instance,
    TopologySpec,
    generate,
    read_instance,
    write_instance,
)
from .solver import (  # noqa: F401
    SolveReport,
    SolveStatus,
    brute_force,
    reduce_sud_to_pic,
    solve_exact,
)
