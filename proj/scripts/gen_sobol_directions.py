"""Regenerate src/sobol_directions.cpp from the new-joe-kuo-6.21201 tables
shipped with scipy.

Usage: python3 scripts/gen_sobol_directions.py > src/sobol_directions.cpp
"""
import numpy as np
from scipy.stats import _sobol

MAX_DIM = 64

poly = _sobol.get_poly_vinit("poly", np.uint64)
vinit = _sobol.get_poly_vinit("vinit", np.uint64)

print("// Generated by scripts/gen_sobol_directions.py. Do not edit.")
print("// Source: new-joe-kuo-6.21201 direction numbers (S. Joe, F. Y. Kuo).")
print()
print('#include "sobol_directions.hpp"')
print()
print("namespace hdmr::detail {")
print()
print("// {degree s, coefficients a, initial m_1..m_s}; entry k describes")
print("// dimension k + 2. Dimension 1 is the van der Corput sequence.")
print("const std::array<DirectionEntry, kMaxSobolDimension - 1> kJoeKuoDirections = {{")
for d in range(1, MAX_DIM):
    p = int(poly[d])
    s = p.bit_length() - 1
    a = (p >> 1) & ((1 << (s - 1)) - 1) if s > 1 else 0
    m = [int(v) for v in vinit[d, :s]]
    ms = ", ".join(str(v) for v in m)
    print(f"    {{{s}, {a}, {{{ms}}}}},")
print("}};")
print()
print("}  // namespace hdmr::detail")
