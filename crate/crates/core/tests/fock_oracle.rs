use freeconv::cumulants::moments_from_cumulants;
use freeconv::fock::{annihilation, creation, r_realization, vacuum_moment, vacuum_moments, FockOperator, FockSpace};
use freeconv::scalar::ratio;
use freeconv::transforms::free_additive_convolve;
use freeconv::{CumulantSequence, MomentSequence, Rational, Scalar};

fn f1() -> Vec<Rational> {
    vec![ratio(1, 2), ratio(2, 1), ratio(-1, 3), ratio(1, 1), ratio(0, 1), ratio(5, 2)]
}

fn f2() -> Vec<Rational> {
    vec![ratio(-1, 1), ratio(1, 4), ratio(3, 1), ratio(-2, 5), ratio(1, 1), ratio(0, 1)]
}

#[test]
fn sum_of_orthogonal_realizations_adds_cumulants() {
    let space = FockSpace::new(2, 6);
    let x1 = r_realization(&space, 1, &f1()).unwrap();
    let x2 = r_realization(&space, 2, &f2()).unwrap();
    let fock = vacuum_moments(&x1.add(&x2).unwrap(), 6).unwrap();
    let summed: Vec<Rational> = f1().iter().zip(f2()).map(|(a, b)| a.clone() + b).collect();
    let expected = moments_from_cumulants(&CumulantSequence::new(summed).unwrap());
    assert_eq!(fock.as_slice(), expected.as_slice());

    let series = free_additive_convolve(
        &moments_from_cumulants(&CumulantSequence::new(f1()).unwrap()),
        &moments_from_cumulants(&CumulantSequence::new(f2()).unwrap()),
    )
    .unwrap();
    assert_eq!(series, MomentSequence::new(fock).unwrap());
}

#[test]
fn deeper_truncation_leaves_moments_unchanged() {
    let shallow = FockSpace::new(2, 6);
    let deep = FockSpace::new(2, 8);
    for n in 1..=6 {
        let word: Vec<usize> = (0..n).map(|i| 1 + (i * 7 % 3 == 0) as usize).collect();
        let moment = |space: &FockSpace| {
            let x1 = r_realization(space, 1, &f1()).unwrap();
            let x2 = r_realization(space, 2, &f2()).unwrap();
            let ops: Vec<&FockOperator<Rational>> = word.iter().map(|&c| if c == 1 { &x1 } else { &x2 }).collect();
            vacuum_moment(&ops).unwrap()
        };
        assert_eq!(moment(&shallow), moment(&deep), "word {word:?}");
    }
}

#[test]
fn annihilation_is_adjoint_of_creation() {
    let space = FockSpace::new(3, 4);
    for letter in 1..=3 {
        let l = creation::<Rational>(&space, letter).unwrap();
        let l_star = annihilation::<Rational>(&space, letter).unwrap();
        assert_eq!(l.transpose(), l_star);
    }
}

/// `p(X) − ⟨p(X)Ω, Ω⟩` for `p(t) = t^power`.
fn centered_power(x: &FockOperator<Rational>, power: usize) -> FockOperator<Rational> {
    let mut coeffs = vec![Rational::from_i64(0); power + 1];
    coeffs[power] = Rational::from_i64(1);
    let p = x.polynomial(&coeffs).unwrap();
    let mean = vacuum_moment(&[&p]).unwrap();
    p.add_scalar(&-mean)
}

#[test]
fn alternating_centered_words_vanish() {
    let space = FockSpace::new(2, 6);
    let x = [r_realization(&space, 1, &f1()).unwrap(), r_realization(&space, 2, &f2()).unwrap()];
    let mut checked = 0;
    for len in 2..=4usize {
        for first in 0..2 {
            let max_total = 6;
            // exponents with total degree ≤ 6
            let mut stack = vec![Vec::<usize>::new()];
            while let Some(powers) = stack.pop() {
                if powers.len() == len {
                    let ops: Vec<FockOperator<Rational>> = powers
                        .iter()
                        .enumerate()
                        .map(|(i, &p)| centered_power(&x[(first + i) % 2], p))
                        .collect();
                    let refs: Vec<&FockOperator<Rational>> = ops.iter().collect();
                    assert_eq!(vacuum_moment(&refs).unwrap(), Rational::from_i64(0), "{powers:?}");
                    checked += 1;
                    continue;
                }
                let used: usize = powers.iter().sum();
                let room = max_total - used - (len - powers.len() - 1);
                for p in 1..=room {
                    let mut next = powers.clone();
                    next.push(p);
                    stack.push(next);
                }
            }
        }
    }
    assert!(checked > 20);
}
