"""
Exact versus sampled p-statistics
=================================

Beyond a few stages F_i is too large to iterate, so p_i is estimated by
sampling F_i uniformly.  On a group where p is genuinely fractional (Q = Z x
Z/2 acting on two copies of Z/2 lamps) we can compare the estimate with the
exact value across many seeds.
"""

from pathlib import Path

import numpy as np

from cosofic import chabauty, pipeline
from cosofic._rng import stream
from cosofic.config import read_config

cfg = read_config(Path(__file__).parent / "configs" / "ladder.json")
scheme = pipeline.build_scheme(cfg.G, cfg.H)
label, g = cfg.words[0]

for i in (1, 2, 3):
    st = pipeline.stage(scheme, i)
    exact = chabauty.p_statistic(g, st.K, cfg.H, st.F)
    z = []
    for seed in range(20):
        est = chabauty.p_statistic(g, st.K, cfg.H, st.F, "mc", 10_000,
                                   stream(seed, i, "p:" + label), seed)
        if est.stderr:
            z.append((float(est.mean) - float(exact)) / est.stderr)
    zs = np.array(z) if z else np.zeros(1)
    print(f"stage {i}: exact p = {exact}, z-scores over 20 seeds: "
          f"mean {zs.mean():+.2f}, max |z| {np.abs(zs).max():.2f}")
