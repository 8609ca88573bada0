//! Minimal SAT solver front end: DIMACS CNF on stdin, `SAT` plus a `v` model
//! line or `UNSAT` on stdout. Exit status follows the usual 10/20 convention.

use std::io::{self, BufReader, Write};
use std::process::ExitCode;

use varisat::Solver;

fn main() -> ExitCode {
    let mut solver = Solver::new();
    if let Err(e) = solver.add_dimacs_cnf(BufReader::new(io::stdin().lock())) {
        eprintln!("ksgk-sat: cannot parse input: {e}");
        return ExitCode::from(1);
    }
    let sat = match solver.solve() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("ksgk-sat: {e}");
            return ExitCode::from(1);
        }
    };
    let mut out = io::stdout().lock();
    if sat {
        let lits: Vec<String> = solver.model().unwrap_or_default().iter().map(|l| l.to_dimacs().to_string()).collect();
        let _ = writeln!(out, "SAT\nv {} 0", lits.join(" "));
        ExitCode::from(10)
    } else {
        let _ = writeln!(out, "UNSAT");
        ExitCode::from(20)
    }
}
