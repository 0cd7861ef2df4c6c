import numpy as np
import pytest

import crowdflow as cf


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Load (or compile) the jitted kernels once so timed assertions later in
    # the suite measure the algorithms, not the JIT.
    flow = cf.AnalyticFlow([cf.uniform(1.0, (0.3, -0.2), 0.5)], (0.0, 0.0, 5.0, 5.0))
    env = cf.Environment(
        bounds=cf.Rect(0.0, 0.0, 5.0, 5.0),
        obstacles=(cf.Circle(2.5, 2.5, 0.4), cf.Rect(1.0, 3.6, 2.0, 4.2)),
        limits=cf.SpeedLimits(),
    )
    cf.edge_cost(flow, (0.5, 0.5), (1.5, 1.7), env.limits)
    cf.build(env, flow, (0.5, 0.5), (4.5, 4.5), 40, 0)
    grid = cf.bake(flow, (0.0, 0.0, 5.0, 5.0), 0.5)
    grid.sample_many(np.array([[1.0, 1.0]]))
    cf.edge_cost(grid, (0.5, 0.5), (1.5, 1.7), env.limits)
