"""
Longest run of non-residues modulo a prime
==========================================

Build the residue table for a small prime, list its runs of consecutive
non-residues and compare the longest one against the square root of p.
"""

# %%
# The table marks every nonzero square modulo p.  For p = 13 the squares are
# 1, 3, 4, 9, 10 and 12, so 5..8 is a block of four non-residues.
from schurqnr.residue import build_residue_table, scan_runs

table = build_residue_table(13)
print("residues:", table.residues().tolist())

report, runs = scan_runs(table)
print("runs (start, length):", [(r.start, r.length) for r in runs])
print("longest:", report.max_run, "floor(sqrt p):", report.isqrt_p, "exceeds:", report.exceeds)

# %%
# For primes that are 1 mod 4 the character is symmetric about p/2, so the
# run list reads the same from either end.
table = build_residue_table(61)
_, runs = scan_runs(table)
print([(r.start, r.length) for r in runs if r.length >= 3])
print([(61 - (r.start + r.length - 1), r.length) for r in runs if r.length >= 3])

# %%
# The compiled path only stores half the table and gives the same answer.
from schurqnr.residue import fast_run_report

assert fast_run_report(61) == scan_runs(table)[0]
