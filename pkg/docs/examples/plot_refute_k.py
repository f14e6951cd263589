"""
Ruling out a long run with a product witness
============================================

For a prime p = 13 mod 24 beyond the exhaustive range, a hypothetical long
run must start at (p+1)/2 + k for k in a bounded window.  For each such k we
exhibit two run elements whose product reduces back into the run, which is
impossible because a product of two non-residues is a residue.
"""

# %%
# Find the first qualifying prime with the package's own primality test.
from schurqnr import proofkit as pk
from schurqnr.arith import is_prime

p = next(q for q in range(pk.PROOF_RANGE_START + 1, 10**5) if q % 24 == 13 and is_prime(q))
k_lo, k_hi = pk.k_window(p)
print(f"p = {p}, k window = [{k_lo}, {k_hi}]")

# %%
# The parameter a is chosen from the size of k.  The criterion compares an
# integer difference against a radical expression, decided exactly.
k = k_lo + 10
a = pk.case_select(p, k)
report = pk.lemma2_criterion(p, k, a)
print("a =", a, "criterion holds:", report.holds)

# %%
# The witness names the two offsets m, n and the reduced product R.
w = pk.lemma2_witness(p, k, a, report)
base = (p + 1) // 2 + k
print(f"({base}+{w.m}) * ({base}+{w.n}) = {w.R} mod {p}, window {w.window}")
assert pk.check_witness(w) == []

# %%
# Sweeping the whole window refutes every k.
summary = pk.sweep_k(p, jobs=1)
print(f"{len(summary.witnesses)}/{summary.checked} values of k refuted")
