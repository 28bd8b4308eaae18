"""Commutant of a small quiver representation, and what restriction forgets.

a --f--> b --g--> c with f = (1, 0)^T and g = (0, 1): the composite is zero.
"""

from fractions import Fraction

from ppersist.diagrams import Diagram, DiagramRep, end_ring, restrict_end_ring
from ppersist.io import fmt_rational
from ppersist.linalg import Matrix

d = Diagram.with_identities(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")})
rep = DiagramRep(d, {"a": 1, "b": 2, "c": 1},
                 {"f": Matrix([[1], [0]]), "g": Matrix([[0, Fraction(1, 2)]])})

ring = end_ring(d, rep)
print("dim End(T) =", ring.dimension, "closed:", ring.is_closed())
for elem in ring.basis:
    print({v: [[fmt_rational(x) for x in row] for row in elem[v].rows] for v in d.vertices})

# the block at c is pinned down by b through g, so forgetting c loses nothing
sub = d.subdiagram(["a", "b"])
hom = restrict_end_ring(sub, d, rep)
print("restrict to a -> b:", hom.source.dimension, "->", hom.target.dimension)
print(hom.matrix)

# forgetting the edge f instead frees a from b
loose = d.subdiagram(["a", "b", "c"], edges=["g"])
print("without f:", end_ring(loose, rep.restrict(loose)).dimension)
