"""Tour of the circuit description language.

Programs are line-oriented: prepare slots, gate them, dilate a site to
displace its cycles, and read one slot out at the end.  When a gate
names a cycle where a participant has no slot yet, the interpreter
expands the whole pure state with its shifted copy, which is how the
displaced pair comes about without any special syntax.
"""

import numpy as np

from tdesim import (
    CircuitParseError,
    format_circuit,
    parse_circuit,
    run_program,
)

PROGRAM = """\
# displaced pair, closed by a second gate one cycle later
prepare q1 @0 0.6|0>+0.8|1>
prepare q2 @0 |0>
cnot q1 q2 @0
dilate q1 +1
cnot q1 q2 @1
output q2 @1
"""


def main():
    program = parse_circuit(PROGRAM)
    print("parsed directives:")
    for d in program.directives:
        print("  ", d)

    report, final = run_program(program)
    print("\nfinal register:", final.register.slots)
    print("output slot:", report.output_slot)
    print("output matrix:")
    print(np.round(report.rho_out.matrix.real, 6))
    print("probabilities:", {k: round(v, 6)
                             for k, v in report.probabilities.items()})
    print(f"entropy: {report.entropy_bits:.6f} bits")

    print("\ncanonical text round-trips through the parser:")
    printed = format_circuit(program)
    print(printed)
    print("round trip equal:", parse_circuit(printed) == program)

    print("malformed programs fail with a line diagnostic:")
    for text in ("prepare a @0 |0>\n",
                 "prepare a @0 |0>\ncnot a b @0\noutput a @0\n",
                 "prepare a @0 2|0>+|vac>\noutput a @0\n"):
        try:
            parse_circuit(text)
        except CircuitParseError as err:
            print("  ", err)


if __name__ == "__main__":
    main()
