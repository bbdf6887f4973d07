"""Element-level result container shared by every formulation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ElementStiffness:
    """Dense element matrix with its global DOF map.

    ``dofs`` lists global DOF ids in the row/column order of ``matrix``;
    ``formulation`` is one of fem, sfem, vem, stab, sbfem. ``parts`` carries
    formulation-specific intermediates (projectors, modal data, ...).
    """

    matrix: np.ndarray
    dofs: np.ndarray
    formulation: str
    parts: object = None
    extra: dict = field(default_factory=dict)

    def symmetry_error(self) -> float:
        k = self.matrix
        scale = max(np.abs(k).max(), 1e-300)
        return float(np.abs(k - k.T).max() / scale)


def node_dofs(nodes, ndim: int) -> np.ndarray:
    """Interleaved DOF ids (u_x, u_y[, u_z] per node)."""
    nodes = np.asarray(nodes, dtype=np.int64)
    return (nodes[:, None] * ndim + np.arange(ndim)).ravel()
