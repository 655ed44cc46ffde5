//! Error surface over a (lambda_s, lambda_t) grid, written as CSV.
//!
//! ```text
//! cargo run --example surface_sweep -- [out.csv]
//! ```

use fieldaoi::experiment::emit_surface;
use fieldaoi::optimize::{logspace, sweep, SweepAxes, SweepCell};
use fieldaoi::{CorrelationParams, Discipline, SystemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "surface.csv".into());
    let params = CorrelationParams::new(1.0, 1.0)?;
    let template = SystemConfig::new(1.0, 1.0, 4.0, Discipline::Fcfs);
    let axes = SweepAxes::new(logspace(0.1, 10.0, 25), logspace(0.1, 20.0, 25))?;
    let grid = sweep(&template, &params, &axes);

    let infeasible = grid.cells.iter().filter(|c| matches!(c, SweepCell::Infeasible(_))).count();
    if let Some((i, j, e)) = grid.argmin() {
        println!(
            "grid minimum eps={e:.6} at lambda_s={:.4} lambda_t={:.4} (interior: {})",
            grid.lambda_s[i],
            grid.lambda_t[j],
            grid.has_interior_minimum()
        );
    }
    println!("{} cells, {infeasible} beyond the FCFS stability boundary", grid.cells.len());
    emit_surface(&grid, std::path::Path::new(&out))?;
    println!("wrote {out}");
    Ok(())
}
