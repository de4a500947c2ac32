"""A genus-2 character with dense image, reduced and realized in both strata.

The reduction shrinks det(a2, b2) to at most half of det(a1, b1) by symplectic
moves; then handle 2 fits as a single slit in the unit square.
"""
from flatperiods import Partition, PeriodVector, realize, verify_certificate
from flatperiods.field import I, sqrt
from flatperiods.sp_action import genus2_normalize

r2 = sqrt(2)
chi = PeriodVector.of(3 + r2, I * 2, r2 + I, 1 - I * r2)
nf = genus2_normalize(chi)
print("normalized:", ", ".join(str(z) for z in nf.chi_prime))
print("det1 =", nf.chi_prime.handle_det(1), " det2 =", nf.chi_prime.handle_det(2))
for part in (Partition.of(2), Partition.of(1, 1)):
    cert = realize(chi, part)
    print(f"H({part}):", verify_certificate(cert).to_text().splitlines()[-1])
