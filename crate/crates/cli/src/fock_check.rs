//! Exact checks of the Fock-space realizations against the combinatorial engine.

use freeconv::cumulants::{cumulants_from_moments, free_mixed_moment};
use freeconv::fock::{r_realization, s_realization, semicircular, vacuum_moment, vacuum_moments, FockSpace};
use freeconv::partitions::catalan;
use freeconv::scalar::ratio;
use freeconv::transforms::{families, s_from_moments};
use freeconv::{CumulantSequence, FockError, FreeFamily, MomentSequence, Rational, Scalar, TruncatedSeries};

use crate::error::CliError;

type Check = Result<bool, String>;

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn catalan_moments() -> Check {
    let space = FockSpace::new(1, 8);
    let m = vacuum_moments(&semicircular::<Rational>(&space, 1).map_err(text)?, 8).map_err(text)?;
    Ok(m.iter().enumerate().all(|(i, v)| {
        let n = i + 1;
        let want = if n % 2 == 0 { catalan((n / 2) as u32).unwrap_or(0) as i64 } else { 0 };
        *v == Rational::from_i64(want)
    }))
}

fn r_round_trip() -> Check {
    let f = vec![ratio(1, 1), ratio(-1, 2), ratio(2, 1), ratio(1, 3), ratio(0, 1), ratio(3, 4)];
    let space = FockSpace::new(1, f.len());
    let op = r_realization(&space, 1, &f).map_err(text)?;
    let m = MomentSequence::new(vacuum_moments(&op, f.len()).map_err(text)?).map_err(text)?;
    Ok(cumulants_from_moments(&m).as_slice() == f.as_slice())
}

fn s_round_trip() -> Check {
    let g = vec![ratio(2, 1), ratio(1, 1), ratio(-1, 3), ratio(1, 2), ratio(1, 1)];
    let space = FockSpace::new(1, 6);
    let op = s_realization(&space, 1, &g).map_err(text)?;
    let m = MomentSequence::new(vacuum_moments(&op, 6).map_err(text)?).map_err(text)?;
    let s = s_from_moments(&m).map_err(text)?;
    let mut padded = g;
    padded.resize(s.order() + 1, ratio(0, 1));
    let inverse = TruncatedSeries::new(padded).truncate(s.order()).reciprocal().map_err(text)?;
    Ok(s == inverse)
}

fn two_letter_words() -> Check {
    let f1 = vec![ratio(1, 2), ratio(1, 1), ratio(-1, 1), ratio(2, 3), ratio(0, 1), ratio(1, 5)];
    let f2 = vec![ratio(-1, 1), ratio(3, 2), ratio(1, 4), ratio(0, 1), ratio(-2, 1), ratio(1, 1)];
    let space = FockSpace::new(2, 6);
    let x1 = r_realization(&space, 1, &f1).map_err(text)?;
    let x2 = r_realization(&space, 2, &f2).map_err(text)?;
    let fam = FreeFamily::new()
        .with(1usize, CumulantSequence::new(f1).map_err(text)?)
        .and_then(|f| f.with(2, CumulantSequence::new(f2)?))
        .map_err(text)?;
    for len in 1..=6 {
        for mask in 0..(1u32 << len) {
            let word: Vec<usize> = (0..len).map(|i| 1 + (mask >> i & 1) as usize).collect();
            let ops: Vec<_> = word.iter().map(|&c| if c == 1 { &x1 } else { &x2 }).collect();
            let fock = vacuum_moment(&ops).map_err(text)?;
            if fock != free_mixed_moment(&word, &fam).map_err(text)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn semicircle_sum() -> Check {
    let space = FockSpace::new(2, 8);
    let sum = semicircular::<Rational>(&space, 1)
        .and_then(|a| a.add(&semicircular(&space, 2)?))
        .map_err(|e: FockError| e.to_string())?;
    let m = vacuum_moments(&sum, 8).map_err(text)?;
    Ok(m.as_slice() == families::semicircle_moments(Rational::from_i64(2), 8).as_slice())
}

pub fn run() -> Result<(), CliError> {
    let checks: [(&str, fn() -> Check); 5] = [
        ("vacuum moments of l + l* are Catalan numbers (order 8)", catalan_moments),
        ("cumulants of l + f(l*) equal f (order 6)", r_round_trip),
        ("S-transform of (1 + l) g(l*) equals 1/g (order 5)", s_round_trip),
        ("two orthogonal letters are free (all words up to length 6)", two_letter_words),
        ("two semicirculars sum to variance 2 (order 8)", semicircle_sum),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let status = match check() {
            Ok(true) => "exact".to_string(),
            Ok(false) => {
                failed += 1;
                "MISMATCH".to_string()
            }
            Err(e) => {
                failed += 1;
                format!("ERROR ({e})")
            }
        };
        println!("{status:<8} {name}");
    }
    if failed > 0 {
        return Err(CliError::check_failed(format!("{failed} Fock checks failed")));
    }
    Ok(())
}
