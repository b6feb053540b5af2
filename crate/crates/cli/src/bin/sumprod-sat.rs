//! Minimal DIMACS CNF solver. Prints `s SATISFIABLE` with a `v` line, or
//! `s UNSATISFIABLE`, and exits 10 or 20 respectively.

use std::fs::File;
use std::io::{BufReader, Write};
use std::process::ExitCode;

use varisat::Solver;

fn main() -> ExitCode {
    let Some(path) = std::env::args().nth(1).filter(|_| std::env::args().len() == 2) else {
        eprintln!("usage: sumprod-sat FILE.cnf");
        return ExitCode::from(64);
    };
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("c cannot open {path}: {e}");
            return ExitCode::from(1);
        }
    };
    let mut solver = Solver::new();
    if let Err(e) = solver.add_dimacs_cnf(BufReader::new(file)) {
        eprintln!("c parse error: {e}");
        return ExitCode::from(1);
    }
    let out = std::io::stdout();
    let mut out = out.lock();
    match solver.solve() {
        Ok(true) => {
            let model = solver.model().unwrap_or_default();
            let lits: Vec<String> = model.iter().map(|l| l.to_dimacs().to_string()).collect();
            let _ = writeln!(out, "s SATISFIABLE");
            let _ = writeln!(out, "v {} 0", lits.join(" "));
            ExitCode::from(10)
        }
        Ok(false) => {
            let _ = writeln!(out, "s UNSATISFIABLE");
            ExitCode::from(20)
        }
        Err(e) => {
            let _ = writeln!(out, "s UNKNOWN");
            eprintln!("c {e}");
            ExitCode::from(0)
        }
    }
}
