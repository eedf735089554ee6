//! Graph exports. Both formats are emitted deterministically: DIMACS with
//! a `p edge` header, pair comments and 1-based sorted edge lines; DOT
//! with `L<level>.<index>` labels, terminal annotations and layout
//! coordinates as position hints.

use std::fmt::Write;

use crate::instance_file::InstanceFile;

pub fn to_dimacs(file: &InstanceFile) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "p edge {} {}",
        file.vertices.len(),
        file.edges.len()
    )
    .unwrap();
    for (i, &(s, t)) in file.terminals.iter().enumerate() {
        writeln!(out, "c pair {} {} {}", i + 1, s + 1, t + 1).unwrap();
    }
    for &(u, v) in &file.edges {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

pub fn to_dot(file: &InstanceFile) -> String {
    let mut out = String::new();
    writeln!(out, "graph \"{}\" {{", file.name).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for rec in &file.vertices {
        let mut attrs = format!(
            "label=\"L{}.{}\" pos=\"{},{}!\"",
            rec.level,
            rec.index,
            rec.col - 1,
            -((rec.row as i64) - 1)
        );
        let mut marks = Vec::new();
        for (i, &(s, t)) in file.terminals.iter().enumerate() {
            if rec.id == s {
                marks.push(format!("s{}", i + 1));
            }
            if rec.id == t {
                marks.push(format!("t{}", i + 1));
            }
        }
        if !marks.is_empty() {
            attrs.push_str(&format!(" terminal=\"{}\"", marks.join(",")));
        }
        writeln!(out, "  {} [{}];", rec.id, attrs).unwrap();
    }
    for &(u, v) in &file.edges {
        writeln!(out, "  {} -- {};", u, v).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}
