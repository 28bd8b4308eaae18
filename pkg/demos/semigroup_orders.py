"""Natural partial orders on small semigroups and their sublevel sets.

Prints the Mitsch order of every associative table of order 2, and the
idempotent-witnessed order with its sublevels for a band with a zero.
"""

from ppersist.semigroup import (
    FiniteSemigroup,
    NotAPartialOrder,
    enumerate_semigroups,
    idempotents,
    mitsch_order,
    nambooripad_order,
    semigroup_sublevel,
)


def strict(order):
    return sorted((a, b) for a, b in order.leq if a != b)


for s in enumerate_semigroups(2):
    print(s.table, "mitsch <:", strict(mitsch_order(s)))

band = FiniteSemigroup([[0, 1, 2], [0, 1, 2], [2, 2, 2]])
print("idempotents:", sorted(idempotents(band)))
try:
    order = nambooripad_order(band)
except NotAPartialOrder as exc:
    print("not a partial order, witness", exc.witness)
else:
    for a in range(band.n):
        print(f"  below {a}:", sorted(semigroup_sublevel(band, a, order)))
