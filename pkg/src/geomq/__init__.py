"""Curvature of 3-dimensional Riemannian manifolds with a circulant metric
and a circulant affinor q with q^3 = id."""

__version__ = "0.1.0"

from .expr import Expr, parse, evaluate, diff, fd_partial  # noqa: E402
from .circulant import (  # noqa: E402
    CirculantMetric, MetricAtPoint, DomainViolation, metric_at, apply_q, inner,
    angle_with_q, q_independent, orthonormal_q_base,
)
from .curvature import (  # noqa: E402
    Curv4, christoffel_at, curvature_at, closed_form_components, fd_curvature_oracle,
)
from .classification import parallel_check, class_check, classify_region  # noqa: E402
from .sectional import (  # noqa: E402
    sectional_curvature, theorem1_check, theorem2_check, monotonicity_scan,
)
from .spec import ManifoldSpec, load_spec  # noqa: E402
