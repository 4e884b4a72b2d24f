use std::fmt::Write as _;

use crate::galerkin::WignerField;

/// `q p W` triples, one grid row per block, blocks separated by a blank line.
pub fn plot_data(field: &WignerField) -> String {
    let mut out = String::new();
    for iq in 0..field.grid.nq() {
        if iq > 0 {
            out.push('\n');
        }
        let q = field.grid.q.node(iq);
        for ip in 0..field.grid.np() {
            writeln!(out, "{} {} {}", q, field.grid.p.node(ip), field.get(iq, ip)).unwrap();
        }
    }
    out
}
