"""Strongest postconditions and weakest liberal preconditions, two ways.

The fixpoint route plants a fresh unknown at one end of the triple:
the least solution of {pre} p {X0} is exactly the strongest
postcondition, and the complemented dual solution of {X0} p {post} is
exactly the weakest liberal precondition.  Both are cross-checked here
against brute-force enumeration of every state.  A loop that never
terminates shows the liberal convention: its wp is every state, its sp
is empty.
"""

from hornfix import (
    BOT,
    TOP,
    arith_structure,
    parse_formula,
    parse_program,
    sp_lfp,
    sp_oracle,
    wp_dual,
    wp_oracle,
)

countdown = parse_program("vars x;\nwhile !(x = 0) do { x := x - 1 }\n")
pre = parse_formula("(= x 3)")
structure = arith_structure(7, countdown, pre)

sp_fix = sp_lfp(countdown, pre, structure)
sp_enum = sp_oracle(countdown, pre, structure, fuel=200)
print("countdown from x = 3 (mod 7)")
print("  sp via fixpoint   :", sorted(sp_fix.tuples))
print("  sp via enumeration:", sorted(sp_enum.table.tuples), "complete:", sp_enum.complete)

increment = parse_program("vars x;\nx := x + 1\n")
post = parse_formula("(= x 1)")
st2 = arith_structure(7, increment, post)
print("\nx := x + 1 with postcondition x = 1 (mod 7)")
print("  wp via dual fixpoint:", sorted(wp_dual(increment, post, st2).tuples))
print("  wp via enumeration  :", sorted(wp_oracle(increment, post, st2, 50).table.tuples))

diverge = parse_program("vars x;\nwhile true do { skip }\n")
st3 = arith_structure(5, diverge)
wp_fix = wp_dual(diverge, BOT, st3)
wp_enum = wp_oracle(diverge, BOT, st3, fuel=50)
print("\na loop that never terminates, postcondition false (mod 5)")
print("  wp via dual fixpoint:", sorted(wp_fix.tuples))
print("  wp via enumeration  :", sorted(wp_enum.table.tuples))
print("  oracle complete     :", wp_enum.complete, "(fuel ran out, as it must)")
print("  sp of true          :", sorted(sp_lfp(diverge, TOP, st3).tuples))
