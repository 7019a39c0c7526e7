# Tracing with the interior product against the full local identity fails for
# states without a fixed local particle number.  The sector-respecting trace
# does not.
import numpy as np

from sea_entanglement import BOSON, FockVector, ModeSpace, Partition, check_c1, check_c2, local_product, partial_trace_nla
from sea_entanglement.fock import ModeLabel

space = ModeSpace(2, 2)
xy = Partition.of({"X": [0], "Y": [1]})
up, down = ModeLabel(0, 0), ModeLabel(0, 1)

pair = FockVector(BOSON, space, {(up, down): 1})
res = partial_trace_nla(pair, xy, "X")
print("trace of |up,down>_X with the interior product:")
print("  scalar part:", res.scalar.real)
print("  operator part on", res.operator_labels())
print(np.round(res.operator.real, 6))
print("  total:", res.total_trace, "(a normalized local state should give 1)")
print("C1 interior product:", check_c1(pair, xy, "nla").ok, " sector trace:", check_c1(pair, xy).ok)

separable = local_product(
    FockVector(BOSON, space, {(up, up): 1}),
    FockVector(BOSON, space, {(ModeLabel(1, 1),): 1}),
    xy,
)
print("\n|up,up>_X (x) |down>_Y")
print("C2 interior product:", check_c2(separable, xy, "X", "nla"))
print("C2 sector trace:    ", check_c2(separable, xy, "X"))
