use std::fs::File;
use std::io::BufWriter;

use freeconv::analytic::{
    stieltjes_density, uniform_grid, Atom, CauchyTransform, GridDensity, InversionOptions, PoissonProduct,
    RationalSolver, SolverOptions,
};
use freeconv::cumulants::cumulants_from_moments;
use freeconv::scalar::to_f64;
use freeconv::transforms::{free_additive_convolve, free_multiplicative_convolve};
use freeconv::{MomentSequence, Rational};
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliError;
use crate::spec::DistSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Add,
    Mult,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Add => "add",
            Kind::Mult => "mult",
        }
    }
}

fn exact(m: &[Rational]) -> Value {
    Value::Array(m.iter().map(|v| Value::String(v.to_string())).collect())
}

fn describe(m: &MomentSequence<Rational>) -> Value {
    json!({
        "moments": exact(m.as_slice()),
        "cumulants": exact(cumulants_from_moments(m).as_slice()),
        "moments_f64": m.as_slice().iter().map(to_f64).collect::<Vec<_>>(),
    })
}

pub fn run(kind: Kind, a: &DistSpec, b: &DistSpec, config: &Config) -> Result<(), CliError> {
    if config.order == 0 {
        return Err(CliError::usage("order must be at least 1"));
    }
    let ma = a.moments(config.order)?;
    let mb = b.moments(config.order)?;
    let result = match kind {
        Kind::Add => free_additive_convolve(&ma, &mb)?,
        Kind::Mult => free_multiplicative_convolve(&ma, &mb)?,
    };
    let mut inputs = Vec::new();
    for (spec, m) in [(a, &ma), (b, &mb)] {
        let mut entry = describe(m);
        entry["spec"] = Value::String(spec.text.clone());
        inputs.push(entry);
    }
    let doc = json!({
        "operation": kind.name(),
        "order": config.order,
        "inputs": inputs,
        "result": describe(&result),
    });
    std::fs::create_dir_all(&config.out)?;
    let path = config.out.join("moments.json");
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    for (n, m) in result.as_slice().iter().enumerate() {
        println!("m{} = {m}", n + 1);
    }
    println!("wrote {}", path.display());

    if config.density {
        let density = density(kind, a, b, config)?;
        let path = config.out.join("density.csv");
        density.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("density mass {:.6} on [{}, {}]", density.mass(), density.grid()[0], density.grid()[density.len() - 1]);
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn padded(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let pad = 0.05 * (hi - lo).max(1e-3);
    uniform_grid(lo - pad, hi + pad, points)
}

fn invert<G: CauchyTransform>(g: &G, lo: f64, hi: f64, config: &Config) -> Result<GridDensity, CliError> {
    let opts = InversionOptions { epsilon: config.epsilon, richardson: config.richardson };
    Ok(stieltjes_density(g, &padded(lo, hi, config.grid_points), &opts)?)
}

fn density(kind: Kind, a: &DistSpec, b: &DistSpec, config: &Config) -> Result<GridDensity, CliError> {
    let opaque = |s: &DistSpec| CliError::usage(format!("--density needs a closed-form spec, got `{}`", s.text));
    match kind {
        Kind::Add => {
            let ra = a.analytic().ok_or_else(|| opaque(a))?;
            let rb = b.analytic().ok_or_else(|| opaque(b))?;
            let r = ra.plus(&rb);
            let (lo, hi) = r.support_bound();
            invert(&RationalSolver::new(r), lo, hi, config)
        }
        Kind::Mult => {
            let (rate, other) = match (a.plain_free_poisson_rate(), b.plain_free_poisson_rate()) {
                (Some(rate), _) => (rate, b),
                (None, Some(rate)) => (rate, a),
                _ => return Err(CliError::usage("--density for mult needs a plain free-poisson factor")),
            };
            let r = other.analytic().ok_or_else(|| opaque(other))?;
            let atoms = if r.variance() == 0.0 && r.rate() == 0.0 {
                vec![Atom::new(1.0, r.shift())]
            } else {
                let (lo, hi) = r.support_bound();
                invert(&RationalSolver::new(r), lo, hi, config)?.quantile_atoms(config.quantile_atoms)
            };
            let model = PoissonProduct::new(rate, &atoms, SolverOptions::default())?;
            let (lo, hi) = model.support_bound();
            invert(&model, lo, hi, config)
        }
    }
}
