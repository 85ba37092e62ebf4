"""A nonlinear channel that still cannot carry a message.

Alice and Bob share an entangled pair spread over two cycles.  Alice
measures her slot in either basis; Bob feeds his two-cycle half through
the displaced measurement box.  Because the box is linear in Bob's
two-cycle reduced state, his output is the maximally mixed qubit no
matter what Alice does, outcome by outcome and on average.  The same
output appears when Bob's input is replaced by the uncorrelated product
of his single-cycle marginals, which is exactly why no signal survives.
"""

import numpy as np

from tdesim import run_no_signaling, run_proper_vs_improper


def main():
    for basis in ("computational", "diagonal"):
        report = run_no_signaling(basis)
        print(f"Alice measures in the {basis} basis:")
        for label, prob, out in report.outcomes:
            print(f"  outcome {label} (p={prob:.3f}): Bob sees")
            print("   ", np.round(out.matrix.real, 9).tolist())
        print(f"  worst deviation from I/2: {report.max_deviation:.3e}")
        print(f"  marginal-product substitution deviation: "
              f"{report.substitution_deviation:.3e}\n")

    print("the loophole the linearity closes: a classically prepared")
    print("ensemble is NOT equivalent to the same average density matrix")
    rep = run_proper_vs_improper()
    print("  ensemble of |0> and |1>, each w=1/2:")
    print("    branch-by-branch output:", np.round(
        np.diag(rep.proper_output.matrix).real, 6).tolist())
    print("    averaged-state output:  ", np.round(
        np.diag(rep.improper_output.matrix).real, 6).tolist())
    print(f"    trace distance: {rep.trace_distance:.6f}")


if __name__ == "__main__":
    main()
