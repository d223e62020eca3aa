import warnings

import numpy as np

import pinchbeam as pb
from pinchbeam.geometry import Scene, UserLayout


def scene_with_users(positions, m=2, side=30.0, power_dbm=20.0, noise_dbm=-90.0):
    """Scene with deterministic user positions in place of the seeded layout."""
    k = len(positions)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        base = pb.build_scene(m, k, side, power_dbm, seed=0, noise_dbm=noise_dbm)
    users = UserLayout(positions=np.asarray(positions, dtype=float))
    return Scene(rf=base.rf, array=base.array, users=users,
                 power_budget_w=base.power_budget_w,
                 noise_variance_w=base.noise_variance_w,
                 rate_weights=np.full(k, 1.0 / k),
                 shadowing_alpha=np.ones((k, m)),
                 side_d_m=base.side_d_m)
