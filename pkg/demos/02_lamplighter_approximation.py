"""
Approximating a lamplighter subgroup by finite-index ones
=========================================================

H is the subgroup of lamp configurations in the ideal generated by 1 + t,
i.e. configurations with an even number of lit lamps.  It has infinite
index.  Stage i replaces it by a finite-index K_i (the same configurations,
with t^i added) and a finite set F_i of cosets.  The averaged conjugates of
K_i and H should agree better and better.
"""

from pathlib import Path

from cosofic import chabauty, pipeline
from cosofic.config import read_config

cfg = read_config(Path(__file__).parent / "configs" / "flagship.json",
                  {"mode": "exact", "depth": 64})
cfg.stages = (1, 6)
scheme = pipeline.build_scheme(cfg.G, cfg.H)

for i in range(1, 7):
    st = pipeline.stage(scheme, i)
    print(f"stage {i}: Q_i = {st.Q_i.generators()}, window {len(st.Z)} points, "
          f"|F_i| = {st.F.size()}, N_i = {st.N_i!r}")

# p_i(g) is the fraction of f in F_i for which g^f lands in exactly one of
# K_i and H.  For t it drops to 0 as soon as t leaves Q_i.
report = pipeline.run_experiment(cfg)
for label in report.labels("p_statistic"):
    print("p   ", label.ljust(4), [str(v) for _, v in report.series("p_statistic", label)])
print("folner t   ", [str(v) for _, v in report.series("folner", "t")])
print("d_prob     ", [f"{float(v):.2e}" for _, v in report.series("d_prob", "D=64")])

# The window lemmas behind this are checked by sampling, and a deliberately
# wrong N_i is caught.
st = pipeline.stage(scheme, 4)
print("violations:", pipeline.violations(pipeline.verify_stage(st, cfg.H, 2000)))
bad = pipeline.mutate_stage_submodule(st, "zero")
print("violations with a corrupted N_4:",
      pipeline.violations(pipeline.verify_stage(st, cfg.H, 2000, N_i=bad)))

# The centered defect of the box of size i, for comparison with the Folner curve
print([str(chabauty.centered_defect(cfg.G.Q, i, (1,))) for i in range(1, 7)])
