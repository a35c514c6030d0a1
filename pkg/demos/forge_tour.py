"""Cover constructions on small examples, each validated before it is returned."""

from soficlab.core import CoverSpec
from soficlab.corpus import shift
from soficlab.forge import ai_sft_cover, forge_receptive_cover, grow_periodic_support
from soficlab.presentation import fischer_cover
from soficlab.verify import degree

even = shift("even")
pi = CoverSpec(fischer_cover(even).graph, "Fischer(even)")

r = forge_receptive_cover(pi, "1")
print("receptive cover:", r.graph.n, "vertices;", r.validation)

a = ai_sft_cover(shift("g1"), "a")
print("AI SFT cover of G1:", a.graph.n, "vertices, degree", degree(a.cover))

g = grow_periodic_support(pi, 0.3, 4)
print("grown injective sub-SFT, q_np(W) vs r_np:", g.validation["q_vs_r"])
print("orbits added:", g.provenance["added"])
