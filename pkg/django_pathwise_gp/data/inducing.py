import heapq
import logging

import numpy as np
from scipy.spatial import cKDTree

from django_pathwise_gp.constants.types import Indices
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import ConfigurationError, DataError

logger = logging.getLogger(__name__)


def knn_inducing_select(data: Dataset, lengthscale: float, neighbors: int) -> Indices:
    """Select inducing points among the training inputs by nearest-neighbour
    elimination.

    Points are retained in farthest-first order over the nearest-neighbour
    graph. Every point carries a radius, its distance to the closest retained
    point that lists it among its ``neighbors`` nearest neighbours (infinite
    while there is none). The alive point with the largest radius is retained
    next, ties going to the earliest index in dataset order; the scan stops
    once every alive radius is strictly below ``lengthscale`` and the
    remaining points are eliminated. Exact neighbour search uses a KD-tree.

    The visiting order does not depend on ``lengthscale``, so the points kept
    at a smaller lengthscale are a superset of those kept at a larger one.
    Every eliminated point lies strictly closer than ``lengthscale`` to a
    retained point, and no two retained points lie closer than
    ``lengthscale`` when ``neighbors`` covers every such pair.

    Args:
        data (Dataset): Points to thin out.
        lengthscale (float): Elimination radius, strictly positive.
        neighbors (int): Number of nearest neighbours inspected per point.

    Returns:
        np.ndarray: Sorted indices of the retained points (never empty).

    Raises:
        DataError: If the dataset is empty.
        ConfigurationError: If ``lengthscale`` or ``neighbors`` is not positive.

    """
    if data.num_points == 0:
        raise DataError("Cannot select inducing points from an empty dataset.")
    if not lengthscale > 0:
        raise ConfigurationError(f"lengthscale must be positive, got {lengthscale}.")
    if neighbors < 1:
        raise ConfigurationError(f"neighbors must be at least 1, got {neighbors}.")

    tree = cKDTree(data.inputs)
    k = min(neighbors + 1, data.num_points)
    distances, indices = tree.query(data.inputs, k=k)
    distances = np.asarray(distances).reshape(data.num_points, k)
    indices = np.asarray(indices).reshape(data.num_points, k)

    radius = np.full(data.num_points, np.inf)
    alive = np.ones(data.num_points, dtype=bool)
    heap = [(-np.inf, i) for i in range(data.num_points)]
    retained = []
    while heap:
        negative, i = heapq.heappop(heap)
        if not alive[i] or -negative != radius[i]:
            continue
        if radius[i] < lengthscale:
            break
        alive[i] = False
        retained.append(i)
        for j, distance in zip(indices[i], distances[i]):
            if alive[j] and distance < radius[j]:
                radius[j] = distance
                heapq.heappush(heap, (-distance, int(j)))

    logger.info(
        "KNN selection kept %d of %d points (lengthscale %g)",
        len(retained),
        data.num_points,
        lengthscale,
    )
    return np.sort(np.asarray(retained, dtype=np.intp))
