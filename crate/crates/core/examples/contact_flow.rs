//! A contact flow map: its quasi-isometry report and a map-file round trip.

use heisenberg_rigidity::field::{contact_flow_map, qi_report, read_map, write_map, FlowKind, Grid, Potential};
use heisenberg_rigidity::Result;

fn main() -> Result<()> {
    let grid = Grid::cube(1.5, 9)?;
    let f = contact_flow_map(Potential::wave(), 0.05, 8, grid, FlowKind::Analytic)?;
    let points = Grid::cube(1.0, 7)?.nodes();
    let rep = qi_report(&f, &points)?;
    println!("L_est = {:.6}", rep.l_est);
    println!("orientation = {:?}", rep.orientation);
    println!("contact residual sup = {:.3e}", rep.contact_residual_sup);

    let table = f.tabulate()?;
    let mut buf = Vec::new();
    write_map(&table, &mut buf)?;
    let back = read_map(buf.as_slice())?;
    println!("map file: {} bytes, round trip exact: {}", buf.len(), back.values()? == table.values()?);
    Ok(())
}
