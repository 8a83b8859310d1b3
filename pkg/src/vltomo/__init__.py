"""V-line and star transforms of symmetric 2-tensor fields on a pixel grid.

Forward models integrate tensor projections along broken rays (two
divergent beams sharing a vertex) or weighted unions of beams; the
inversion routines recover potentials and tensor components through
explicit beam-integral formulas, second-order PDE solves, and a
filtered-backprojection pipeline for the star transform.
"""

from .errors import (
    VltError,
    PreconditionError,
    GridError,
    GeometryError,
    FieldFormatError,
    ClassificationError,
    SolverFailure,
    CFLError,
    SingularDirectionError,
    SolveError,
)
from .fields import (
    Grid,
    ScalarField,
    VectorField,
    SymTensorField,
    Direction,
    VLineGeometry,
    StarGeometry,
    write_field,
    read_field,
)
from .phantoms import (
    CUTOFF_PEAK,
    cutoff_eval,
    phantom1,
    phantom2,
    potential_scalar,
    potential_vector,
)
from .calculus import (
    gradient,
    dir_deriv,
    sym_deriv,
    perp_sym_deriv,
    d2,
    dperp2,
    ddperp,
    axis_integral,
)
from .raytrace import xray, xray_moment1
from .vlt import (
    VLT_KINDS,
    StarData,
    project_tensor,
    vline_scalar,
    vlt_forward,
    star_forward,
)
from .pdesolve import (
    SecondOrderProblem,
    solve_elliptic,
    solve_parabolic,
    solve_hyperbolic,
)
from .radon import (
    Sinogram,
    radon_forward,
    sino_sderiv,
    fbp,
    write_sinogram,
    read_sinogram,
)
from .inversion import (
    QMatrix,
    zero_margin,
    invert_d2phi,
    invert_dperp2phi,
    invert_ddperpphi,
    invert_dg,
    invert_dperpg,
    invert_LTM,
    invert_LL1T,
    invert_LL1M,
    gamma_vectors,
    invert_star,
)
from .harness import (
    METHODS,
    ANGLES,
    ExperimentConfig,
    RunManifest,
    add_noise,
    relative_error_spectral,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "VltError",
    "PreconditionError",
    "GridError",
    "GeometryError",
    "FieldFormatError",
    "ClassificationError",
    "SolverFailure",
    "CFLError",
    "SingularDirectionError",
    "SolveError",
    "Grid",
    "ScalarField",
    "VectorField",
    "SymTensorField",
    "Direction",
    "VLineGeometry",
    "StarGeometry",
    "write_field",
    "read_field",
    "CUTOFF_PEAK",
    "cutoff_eval",
    "phantom1",
    "phantom2",
    "potential_scalar",
    "potential_vector",
    "gradient",
    "dir_deriv",
    "sym_deriv",
    "perp_sym_deriv",
    "d2",
    "dperp2",
    "ddperp",
    "axis_integral",
    "xray",
    "xray_moment1",
    "VLT_KINDS",
    "StarData",
    "project_tensor",
    "vline_scalar",
    "vlt_forward",
    "star_forward",
    "SecondOrderProblem",
    "solve_elliptic",
    "solve_parabolic",
    "solve_hyperbolic",
    "Sinogram",
    "radon_forward",
    "sino_sderiv",
    "fbp",
    "read_sinogram",
    "write_sinogram",
    "QMatrix",
    "zero_margin",
    "invert_d2phi",
    "invert_dperp2phi",
    "invert_ddperpphi",
    "invert_dg",
    "invert_dperpg",
    "invert_LTM",
    "invert_LL1T",
    "invert_LL1M",
    "gamma_vectors",
    "invert_star",
    "METHODS",
    "ANGLES",
    "ExperimentConfig",
    "RunManifest",
    "add_noise",
    "relative_error_spectral",
    "run_experiment",
    "__version__",
]
