"""Tour of the ambient model: coordinate vectors, blocks, structured tails.

Every operator here is a finite nonnegative block acting on the leading
coordinates plus a diagonal tail (zero / identity / geometric) on the rest.
"""

from poscon import (
    CoordVector,
    GeometricTail,
    IdentityTail,
    OperatorModel,
    adjoint,
    apply,
    basis,
    corner,
    is_positive,
    modulus,
    support,
)
from poscon.serialization import dumps_canonical, operator_to_dict

print("== coordinate vectors ==")
x = CoordVector([1.0, -2.0, 0.0, 0.5])
print("x              :", x.entries)
print("|x|            :", modulus(x).entries)
print("support of x   :", sorted(support(x).indices))
print("e_3            :", basis(3).entries)
print("trailing zeros are logical noise:", CoordVector([1.0]) == CoordVector([1.0, 0.0]))

print()
print("== a block with an identity tail ==")
T = OperatorModel(2.0, [[0.5, 0.25], [0.0, 0.5]], IdentityTail())
print("block:")
print(T.block)
print("corner through index 4 (tail becomes visible):")
print(corner(T, 4))
print("T e_3 =", apply(T, basis(3)).entries, " (the tail fixes e_3)")
print("T is positive:", is_positive(T))

print()
print("== adjoints transpose the block, tails are self-adjoint ==")
print(adjoint(T).block)
print("double adjoint returns the original:", adjoint(adjoint(T)) == T)

print()
print("== geometric tails climb to one ==")
G = OperatorModel(2.0, [[0.5]], GeometricTail(0.5, 0.9))
print("tail diagonal entries:", G.tail.diag(6))

print()
print("== the JSON wire format ==")
print(dumps_canonical(operator_to_dict(G)))
