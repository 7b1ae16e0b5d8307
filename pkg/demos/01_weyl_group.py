# Shift and clock operators of Z_2 x Z_3 and the irreducibility of the group they generate.
import numpy as np

from mixchan import CyclicOrders, WeylLabel, clock_matrix, commutant_dimension, generators, shift_matrix, weyl_operator

orders = CyclicOrders([2, 3])
print("dimension n =", orders.n)
print("basis order:", list(orders.multi_indices()))

# U_2 shifts the Z_3 component, T_2 multiplies by exp(2 pi i k_2 / 3)
print(np.round(shift_matrix(orders, 2).real).astype(int))
print(np.round(np.diag(clock_matrix(orders, 2)), 3))

# W(a, b) W(a', b') is W(a + a', b + b') up to a phase
x, y = WeylLabel((1, 2), (0, 1)), WeylLabel((1, 1), (1, 1))
prod = weyl_operator(orders, x) @ weyl_operator(orders, y)
target = weyl_operator(orders, WeylLabel(orders.add(x.a, y.a), orders.add(x.b, y.b)))
k = np.unravel_index(np.argmax(np.abs(target)), target.shape)
print("phase:", np.round(prod[k] / target[k], 6), "residual:", np.abs(prod - prod[k] / target[k] * target).max())

# only scalars commute with every generator; the clock subgroup alone leaves the diagonal algebra
print("commutant of the full group:", commutant_dimension(generators(orders)))
print("commutant of the clocks:", commutant_dimension([clock_matrix(orders, j) for j in (1, 2)]))
