#!/usr/bin/env python3
"""Run an SMT-LIB 2 script from stdin (or a file argument) through the cvc5 Python API.

Usable as a solver command: --solver-cmd "python3 tools/cvc5_smt2.py"
"""
import sys

import cvc5


def main() -> int:
    text = open(sys.argv[1]).read() if len(sys.argv) > 1 else sys.stdin.read()
    tm = cvc5.TermManager() if hasattr(cvc5, "TermManager") else None
    solver = cvc5.Solver(tm) if tm else cvc5.Solver()
    solver.setOption("produce-models", "true")
    symbols = cvc5.SymbolManager(tm if tm else solver)
    parser = cvc5.InputParser(solver, symbols)
    parser.setStringInput(cvc5.InputLanguage.SMT_LIB_2_6, text, "input")
    while True:
        cmd = parser.nextCommand()
        if cmd.isNull():
            return 0
        out = cmd.invoke(solver, symbols)
        if out:
            sys.stdout.write(out if out.endswith("\n") else out + "\n")
            sys.stdout.flush()


if __name__ == "__main__":
    sys.exit(main())
