use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use freeconv::analytic::{free_entropy_1d, EntropyOptions, GridDensity};

use crate::error::CliError;

pub fn run(path: &Path, opts: &EntropyOptions) -> Result<(), CliError> {
    let file = File::open(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let density = GridDensity::read_csv(BufReader::new(file))?;
    let estimate = free_entropy_1d(&density, opts)?;
    println!("chi = {:.6}", estimate.value());
    println!("cells = {:.8}", estimate.cells);
    println!("quantile = {:.8}", estimate.quantile);
    println!("disagreement = {:.3e}", estimate.disagreement());
    Ok(())
}
