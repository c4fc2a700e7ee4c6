#![allow(dead_code)]

use std::fs;
use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// What a generated fixture file is expected to do at admission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Mpi,
    Serial,
    NoMain,
    Embedded,
    TooLong,
    Broken,
    Copy,
}

pub struct Fixture {
    pub path: String,
    pub text: String,
    pub kind: Kind,
}

const STATEMENT_CALLS: &[&str] = &[
    "MPI_Barrier(MPI_COMM_WORLD);",
    "MPI_Bcast(&n, 1, MPI_INT, 0, MPI_COMM_WORLD);",
    "MPI_Reduce(&local, &total, 1, MPI_DOUBLE, MPI_SUM, 0, MPI_COMM_WORLD);",
    "MPI_Allreduce(&local, &total, 1, MPI_DOUBLE, MPI_MAX, MPI_COMM_WORLD);",
    "MPI_Send(&local, 1, MPI_DOUBLE, 0, 7, MPI_COMM_WORLD);",
    "MPI_Recv(&local, 1, MPI_DOUBLE, 1, 7, MPI_COMM_WORLD, &status);",
    "MPI_Gather(&local, 1, MPI_DOUBLE, buf, 1, MPI_DOUBLE, 0, MPI_COMM_WORLD);",
];

const WORK: &[&str] = &[
    "local += i * 0.5;",
    "n = n + 1;",
    "buf[i % 8] = local;",
    "local = local / 2.0 + i;",
    "printf(\"%d %f\\n\", i, local);",
];

fn indent(depth: usize) -> String {
    "    ".repeat(depth)
}

/// A block of random work lines, optionally with MPI calls mixed in.
fn body(rng: &mut StdRng, depth: usize, mpi: bool, lines: usize) -> Vec<String> {
    let mut out = Vec::new();
    for _ in 0..lines {
        let pad = indent(depth);
        match rng.gen_range(0..10) {
            0..=2 if mpi => out.push(format!("{pad}{}", STATEMENT_CALLS.choose(rng).unwrap())),
            3 if depth < 3 => {
                out.push(format!("{pad}for (i = 0; i < {}; i++)", rng.gen_range(2..50)));
                out.push(format!("{pad}{{"));
                let inner = rng.gen_range(1..3);
                out.extend(body(rng, depth + 1, mpi, inner));
                out.push(format!("{pad}}}"));
            }
            4 if depth < 3 => {
                out.push(format!("{pad}if (rank == {})", rng.gen_range(0..3)));
                out.push(format!("{pad}{{"));
                out.extend(body(rng, depth + 1, mpi, 1));
                out.push(format!("{pad}}}"));
                if rng.gen_bool(0.4) {
                    out.push(format!("{pad}else"));
                    out.push(format!("{pad}{{"));
                    out.extend(body(rng, depth + 1, mpi, 1));
                    out.push(format!("{pad}}}"));
                }
            }
            _ => out.push(format!("{pad}{}", WORK.choose(rng).unwrap())),
        }
    }
    out
}

fn helper(rng: &mut StdRng, name: &str) -> Vec<String> {
    let mut v = vec![format!("double {name}(double x)"), "{".into()];
    match rng.gen_range(0..3) {
        0 => v.push("    return x * x;".into()),
        1 => {
            v.push("    if (x < 0)".into());
            v.push("    {".into());
            v.push("        return -x;".into());
            v.push("    }".into());
            v.push("    return x;".into());
        }
        _ => v.push("    return 4.0 / (1.0 + x * x);".into()),
    }
    v.push("}".into());
    v
}

fn mpi_program(rng: &mut StdRng, extra_lines: usize) -> String {
    let mut v: Vec<String> = vec!["#include <mpi.h>".into(), "#include <stdio.h>".into()];
    if rng.gen_bool(0.5) {
        v.push(format!("#define N {}", rng.gen_range(4..100)));
    }
    for k in 0..rng.gen_range(0..2) {
        v.extend(helper(rng, &format!("f{k}")));
    }
    v.push("int main(int argc, char **argv)".into());
    v.push("{".into());
    v.push("    int rank, size, i, n = 0;".into());
    v.push("    double local = 0.0, total = 0.0, buf[8];".into());
    v.push("    MPI_Status status;".into());
    v.push("    MPI_Init(&argc, &argv);".into());
    v.push("    MPI_Comm_rank(MPI_COMM_WORLD, &rank);".into());
    if rng.gen_bool(0.8) {
        v.push("    MPI_Comm_size(MPI_COMM_WORLD, &size);".into());
    }
    let lines = rng.gen_range(1..6) + extra_lines;
    v.extend(body(rng, 1, true, lines));
    v.push("    MPI_Finalize();".into());
    v.push("    return 0;".into());
    v.push("}".into());
    v.join("\n") + "\n"
}

fn serial_program(rng: &mut StdRng) -> String {
    let mut v: Vec<String> = vec!["#include <stdio.h>".into(), "int main()".into(), "{".into()];
    v.push("    int i, n = 0, rank = 0;".into());
    v.push("    double local = 0.0, buf[8];".into());
    let lines = rng.gen_range(1..5);
    v.extend(body(rng, 1, false, lines));
    v.push("    return 0;".into());
    v.push("}".into());
    v.join("\n") + "\n"
}

/// Rewrites standardized code into a messier but equivalent layout.
fn scramble(rng: &mut StdRng, text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let t = line.trim_start();
        match rng.gen_range(0..6) {
            0 => out.push_str(&format!("\t{t}\n")),
            1 => out.push_str(&format!("{t}  /* note */\n")),
            2 if t == "{" => out.push_str("{ \n\n"),
            3 => out.push_str(&format!("  {}\n", t.replace(", ", ",").replace(" = ", "="))),
            _ => out.push_str(&format!("{line}\n")),
        }
    }
    out
}

/// Deterministic corpus of `n` files mixing admissible MPI programs with
/// every exclusion case.
pub fn corpus(n: usize, seed: u64) -> Vec<Fixture> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out: Vec<Fixture> = Vec::with_capacity(n);
    for i in 0..n {
        let kind = match i % 20 {
            0 => Kind::Serial,
            1 => Kind::NoMain,
            2 => Kind::Embedded,
            3 => Kind::TooLong,
            4 => Kind::Broken,
            5 if !out.is_empty() => Kind::Copy,
            _ => Kind::Mpi,
        };
        let text = match kind {
            Kind::Mpi => {
                let t = mpi_program(&mut rng, 0);
                if rng.gen_bool(0.3) {
                    scramble(&mut rng, &t)
                } else {
                    t
                }
            }
            Kind::Serial => serial_program(&mut rng),
            Kind::NoMain => {
                let mut v = vec!["#include <mpi.h>".to_string(), "void work(int rank)".into(), "{".into()];
                v.push("    MPI_Barrier(MPI_COMM_WORLD);".into());
                v.push("}".into());
                v.join("\n") + "\n"
            }
            Kind::Embedded => {
                let t = mpi_program(&mut rng, 0);
                t.replace("    MPI_Init(&argc, &argv);", "    if (MPI_Init(&argc, &argv) != MPI_SUCCESS)\n    {\n        return 1;\n    }")
            }
            Kind::TooLong => mpi_program(&mut rng, 80),
            Kind::Broken => mpi_program(&mut rng, 0).replacen("{", "{ {", 2),
            Kind::Copy => {
                let prev = out.iter().rev().find(|f| f.kind == Kind::Mpi).map(|f| f.text.clone());
                let prev = prev.unwrap_or_else(|| mpi_program(&mut rng, 0));
                scramble(&mut rng, &prev)
            }
        };
        let dir = ["alpha", "beta/src", "gamma/x/y", "delta"][i % 4];
        out.push(Fixture { path: format!("{dir}/file_{i:04}.c"), text, kind });
    }
    out
}

pub fn write_tree(root: &Path, fixtures: &[Fixture]) {
    for f in fixtures {
        let p = root.join(&f.path);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, &f.text).unwrap();
    }
}
