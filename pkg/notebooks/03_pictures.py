"""
Parameter pictures and laminations
==================================

Render a small view of the connectedness locus of the reflection family,
then draw the period-6 parameter lamination as an SVG.
"""
from sdlab import portraits as P
from sdlab import render as R

# a 256 x 256 view; the full-size version is `sdlab render-cs --size 2048`
job = R.RenderJob("cs", complex(0.05, 0.0), 0.7, None, (256, 256), 300)
rgb, grid = R.render_cs_locus(job)
with open("cs_locus_small.png", "wb") as fh:
    fh.write(R.to_png_bytes(rgb))
print("escaped pixels:", int((grid.status == R.ESCAPED).sum()))

# the parameter lamination of periodic angles up to period 6
lam = P.parameter_lamination(6, "CS_model")
svg, _ = R.render_lamination_disk(lam)
with open("cs_lamination.svg", "w") as fh:
    fh.write(svg)

# both models give the same combinatorics
print(P.model_isomorphism_check(6)["passed"])
