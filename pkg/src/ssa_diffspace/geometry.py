"""Canonical angles, difference subspaces and the indices built on them.

Two constructions of the difference subspace (DS) are provided:

- :func:`difference_subspace` builds it from canonical vector pairs, ``d_i ∝ v_i - u_i``.
- :func:`difference_subspace_analytic` takes the eigenvectors of ``G = P + Q`` (sum of the two
  orthogonal projectors) with eigenvalues strictly between ``delta_floor`` and one.

Both keep the directions whose G-eigenvalue ``g_i = 1 - cos(theta_i)`` lies in
``(delta_floor, 1)``: smaller values are overlap, ``g_i = 1`` (orthogonal pairs) is excluded
because the eigenspace of ``G`` at one mixes sum and difference directions there.
"""

import logging
from typing import (
    Sequence,
    Union,
)

import numpy as np
from scipy import linalg

from .errors import (
    DegenerateInputError,
    ParameterError,
    ShapeError,
)
from .types import (
    CanonicalAngleSet,
    DifferenceSubspace,
    FloatArray,
    Subspace,
)
from .utils import fix_signs


logger = logging.getLogger(__name__)

LOG_COSINE_FLOOR = 1e-12
"""Cosines are clamped to this value before taking logarithms so orthogonal pairs stay finite."""

ORTHOGONAL_TOLERANCE = 1e-12
"""G-eigenvalues at or above ``1 - ORTHOGONAL_TOLERANCE`` are treated as exactly one."""

OVERLAP_TOLERANCE = 1e-8
"""G-eigenvalues within this distance of two count as overlap in the analytic construction."""

AnySubspace = Union[Subspace, DifferenceSubspace]


def _check_ambient(a: AnySubspace, b: AnySubspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ShapeError(f"ambient dimensions differ: {a.ambient_dim} != {b.ambient_dim}")


def _check_delta_floor(delta_floor: float) -> None:
    if not 0.0 < delta_floor < 1.0:
        raise ParameterError(f"delta_floor must satisfy 0 < delta_floor < 1, got {delta_floor}")


def canonical_angles(P: AnySubspace, Q: AnySubspace) -> CanonicalAngleSet:
    """Canonical angles between two subspaces from the SVD of ``Phi^T Psi``.

    Args:
        P: First subspace (basis ``Phi``).
        Q: Second subspace (basis ``Psi``).

    Returns:
        ``k = min(dim P, dim Q)`` cosines in descending order (clamped to [0, 1]) with the
        paired canonical vectors ``u_i = Phi U[:, i]`` and ``v_i = Psi V[:, i]``.

    Raises:
        ShapeError: If the ambient dimensions differ.

    Examples:
        >>> P = Subspace.from_basis([1.0, 0.0, 0.0])
        >>> Q = Subspace.from_basis([1.0, 1.0, 0.0])
        >>> round(float(canonical_angles(P, Q).cosines[0]), 5)
        0.70711
    """
    _check_ambient(P, Q)
    k = min(P.basis.shape[1], Q.basis.shape[1])
    if k == 0:
        empty = np.zeros((P.ambient_dim, 0))
        return CanonicalAngleSet(cosines=np.zeros(0), left_vectors=empty, right_vectors=empty)

    u, s, vt = linalg.svd(P.basis.T @ Q.basis, full_matrices=False)
    return CanonicalAngleSet(
        cosines=np.clip(s[:k], 0.0, 1.0),
        left_vectors=P.basis @ u[:, :k],
        right_vectors=Q.basis @ vt[:k].T,
    )


def difference_subspace(P: AnySubspace, Q: AnySubspace, delta_floor: float = 1e-6) -> DifferenceSubspace:
    """Generalised difference subspace from the normalised differences of canonical vector pairs.

    Args:
        P: First subspace.
        Q: Second subspace.
        delta_floor: Pairs with ``1 - cos(theta) <= delta_floor`` count as overlap.

    Returns:
        DifferenceSubspace with columns ordered by ascending G-eigenvalue.

    Raises:
        ParameterError: If ``delta_floor`` is outside (0, 1).
        ShapeError: If the ambient dimensions differ.
    """
    _check_delta_floor(delta_floor)
    angles = canonical_angles(P, Q)
    g = 1.0 - angles.cosines

    overlap_dim = int(np.count_nonzero(g <= delta_floor))
    keep = (g > delta_floor) & (g < 1.0 - ORTHOGONAL_TOLERANCE)

    differences = angles.right_vectors[:, keep] - angles.left_vectors[:, keep]
    norms = np.linalg.norm(differences, axis=0)
    basis = fix_signs(differences / norms) if differences.shape[1] else differences

    return DifferenceSubspace(
        basis=basis,
        g_eigenvalues=g[keep],
        overlap_dim=overlap_dim,
        source_dims=(P.dim, Q.dim),
    )


def difference_subspace_analytic(P: AnySubspace, Q: AnySubspace, delta_floor: float = 1e-6) -> DifferenceSubspace:
    """Generalised difference subspace from the eigendecomposition of ``G = P P^T + Q Q^T``.

    Keeps the eigenvectors whose eigenvalue lies strictly in ``(delta_floor, 1)``. Eigenvalues
    within ``1e-8`` of two are counted as the overlap dimension.

    Raises:
        ParameterError: If ``delta_floor`` is outside (0, 1).
        ShapeError: If the ambient dimensions differ.
    """
    _check_delta_floor(delta_floor)
    _check_ambient(P, Q)
    G = P.basis @ P.basis.T + Q.basis @ Q.basis.T
    eigenvalues, eigenvectors = linalg.eigh(G)

    keep = (eigenvalues > delta_floor) & (eigenvalues < 1.0 - ORTHOGONAL_TOLERANCE)
    overlap_dim = int(np.count_nonzero(np.abs(eigenvalues - 2.0) <= OVERLAP_TOLERANCE))
    basis = eigenvectors[:, keep]

    return DifferenceSubspace(
        basis=fix_signs(basis) if basis.shape[1] else basis,
        g_eigenvalues=eigenvalues[keep],
        overlap_dim=overlap_dim,
        source_dims=(P.dim, Q.dim),
    )


def mean_angle_dissimilarity(cosines: FloatArray, count: int) -> float:
    """Mean of ``1 - cos(theta_i)`` over the ``count`` smallest angles (fewer if fewer exist)."""
    if count < 1:
        raise ParameterError(f"angle count must satisfy c >= 1, got {count}")
    used = cosines[: min(count, cosines.size)]
    return float(np.mean(1.0 - used))


def subspace_dissimilarity(A: AnySubspace, B: AnySubspace, c: int) -> float:
    """Direction dissimilarity: mean ``1 - cos(theta_i)`` over the ``c`` smallest canonical angles.

    When fewer than ``c`` angles exist the mean runs over those available.

    Raises:
        DegenerateInputError: If either subspace is empty.
        ParameterError: If ``c < 1``.
        ShapeError: If the ambient dimensions differ.

    Examples:
        >>> P = Subspace.from_basis([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        >>> subspace_dissimilarity(P, P, c=5)
        0.0
    """
    if A.dim == 0 or B.dim == 0:
        raise DegenerateInputError("dissimilarity is undefined for an empty subspace")
    return mean_angle_dissimilarity(canonical_angles(A, B).cosines, c)


def log_cosine_sum(cosines: FloatArray) -> float:
    """``sum(log(max(cos, 1e-12)))``, the logarithm of the product of cosines."""
    return float(np.sum(np.log(np.maximum(cosines, LOG_COSINE_FLOOR))))


def magnitude(P: AnySubspace, Q: AnySubspace) -> float:
    """Magnitude index: natural-log sum of all canonical cosines between ``P`` and ``Q``.

    Always ``<= 0``; identical subspaces give 0 and orthogonal pairs contribute ``log(1e-12)``.

    Raises:
        ShapeError: If the ambient dimensions differ.
    """
    return log_cosine_sum(canonical_angles(P, Q).cosines)


def principal_component_subspace(ds_list: Sequence[DifferenceSubspace], nor_dims: int) -> Subspace:
    """Principal component subspace of a collection of difference subspaces.

    Eigendecomposes ``S = sum_i D_i D_i^T`` and keeps the top ``min(nor_dims, rank(S))``
    eigenvectors. Empty members are skipped.

    Args:
        ds_list: Difference subspaces sharing one ambient dimension.
        nor_dims: Dimension cap.

    Returns:
        Subspace whose spectrum holds the retained eigenvalues of ``S``.

    Raises:
        DegenerateInputError: If the list is empty or every member is empty.
        ParameterError: If ``nor_dims < 1``.
        ShapeError: If the members' ambient dimensions differ.
    """
    if nor_dims < 1:
        raise ParameterError(f"nor_dims must satisfy nor_dims >= 1, got {nor_dims}")
    members = [ds for ds in ds_list if ds.dim > 0]
    if not members:
        raise DegenerateInputError("every difference subspace is empty")
    ambient = members[0].ambient_dim
    for ds in members[1:]:
        _check_ambient(members[0], ds)

    stacked = np.hstack([ds.basis for ds in members])
    S = stacked @ stacked.T
    eigenvalues, eigenvectors = linalg.eigh(S)
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]

    tolerance = max(float(eigenvalues[0]), 1.0) * ambient * np.finfo(np.float64).eps * 10
    rank = int(np.count_nonzero(eigenvalues > tolerance))
    keep = min(nor_dims, rank)
    if keep < nor_dims:
        logger.debug("Principal component subspace capped at rank %d (nor_dims=%d)", keep, nor_dims)

    return Subspace(basis=fix_signs(eigenvectors[:, :keep]), spectrum=eigenvalues[:keep])
