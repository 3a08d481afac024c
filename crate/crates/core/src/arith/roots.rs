use num_traits::{One, Signed, Zero};

use super::{int, Interval, Poly, Rational, Sign};
use crate::error::{invalid, Result};

/// Result of a Sturm count over `(lo, hi]`.
///
/// When an endpoint is itself a root it is moved up by a certified amount
/// (see [`root_gap`]) and the moved value is reported here; the count is
/// unaffected by the move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SturmCount {
    pub count: usize,
    pub lo_perturbed: Option<Rational>,
    pub hi_perturbed: Option<Rational>,
}

pub(crate) fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]).expect("nonzero divisor");
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

fn variations(seq: &[Poly], x: &Rational) -> usize {
    let mut last: Option<bool> = None;
    let mut v = 0;
    for s in seq {
        let y = s.eval(x);
        if y.is_zero() {
            continue;
        }
        let pos = y.is_positive();
        if let Some(l) = last {
            if l != pos {
                v += 1;
            }
        }
        last = Some(pos);
    }
    v
}

/// Half of a lower bound on the distance from the root `e` of the squarefree
/// polynomial `sqf` to every other complex root.
///
/// With `g = sqf / (x - e)` and `h(x) = g(x + e)`, the roots of `h` are the
/// differences `r - e`; the reciprocals of those are the roots of the reversed
/// polynomial, whose Cauchy bound `B` gives `|r - e| > 1/B`.
pub(crate) fn root_gap(sqf: &Poly, e: &Rational) -> Rational {
    let lin = Poly::new(vec![-e.clone(), Rational::one()]);
    let g = sqf.exact_div(&lin).expect("endpoint is a root");
    if g.is_constant() {
        return Rational::one();
    }
    let h = g.shift(e);
    let b = h.reversed().cauchy_bound();
    (b * int(2)).recip()
}

/// Number of distinct real roots of `p` in the half-open interval `(lo, hi]`.
pub fn sturm_count(p: &Poly, iv: &Interval) -> Result<SturmCount> {
    if p.is_zero() {
        return invalid("Sturm count of the zero polynomial");
    }
    let sqf = p.squarefree_part();
    let mut out = SturmCount {
        count: 0,
        lo_perturbed: None,
        hi_perturbed: None,
    };
    if sqf.is_constant() || iv.lo == iv.hi {
        return Ok(out);
    }
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    if sqf.eval(&lo).is_zero() {
        lo = &lo + root_gap(&sqf, &lo);
        out.lo_perturbed = Some(lo.clone());
    }
    if sqf.eval(&hi).is_zero() {
        hi = &hi + root_gap(&sqf, &hi);
        out.hi_perturbed = Some(hi.clone());
    }
    if lo >= hi {
        return Ok(out);
    }
    let seq = sturm_sequence(&sqf);
    out.count = variations(&seq, &lo) - variations(&seq, &hi);
    Ok(out)
}

/// Disjoint rational intervals, ascending, each containing exactly one real
/// root of `p` in its interior. Endpoints are never roots.
pub fn isolate_real_roots(p: &Poly) -> Result<Vec<Interval>> {
    if p.is_zero() {
        return invalid("root isolation of the zero polynomial");
    }
    let sqf = p.squarefree_part();
    if sqf.is_constant() {
        return Ok(vec![]);
    }
    let seq = sturm_sequence(&sqf);
    let b = sqf.cauchy_bound();
    let lo = -b.clone();
    let hi = b;
    let total = variations(&seq, &lo) - variations(&seq, &hi);
    let mut stack = vec![(lo, hi, total)];
    let mut found = Vec::new();
    while let Some((lo, hi, n)) = stack.pop() {
        match n {
            0 => continue,
            1 => {
                found.push(Interval { lo, hi });
                continue;
            }
            _ => {}
        }
        let mut mid = (&lo + &hi) / int(2);
        if sqf.eval(&mid).is_zero() {
            let half_room = (&hi - &mid) / int(2);
            mid = &mid + root_gap(&sqf, &mid).min(half_room);
        }
        let vmid = variations(&seq, &mid);
        let left = variations(&seq, &lo) - vmid;
        stack.push((lo, mid.clone(), left));
        stack.push((mid, hi, n - left));
    }
    found.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(found)
}

/// Bisect an isolating interval until its width is at most `width`. The
/// result is nested in `iv` and isolates the same root.
pub fn refine_interval(p: &Poly, iv: &Interval, width: &Rational) -> Result<Interval> {
    if !width.is_positive() {
        return invalid("refinement width must be positive");
    }
    let sqf = p.squarefree_part();
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    if lo == hi {
        return Ok(iv.clone());
    }
    let flo = sqf.eval(&lo);
    if flo.is_zero() {
        return Ok(Interval::point(lo));
    }
    let fhi = sqf.eval(&hi);
    if fhi.is_zero() {
        return Ok(Interval::point(hi));
    }
    let slo = Sign::of(&flo);
    if slo == Sign::of(&fhi) {
        return invalid(format!("interval {iv:?} does not bracket a simple root"));
    }
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / int(2);
        let fm = sqf.eval(&mid);
        if fm.is_zero() {
            return Ok(Interval::point(mid));
        }
        if Sign::of(&fm) == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Interval { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    /// Sign-scan oracle: count sign changes of `p` on a grid of step `1/steps`.
    /// Only valid when roots are separated by more than the step and no root
    /// lands on a grid point.
    fn sign_scan(p: &Poly, lo: i64, hi: i64, steps: i64) -> Vec<(Rational, Rational)> {
        let mut out = vec![];
        let mut prev = rat(lo, 1);
        let mut prev_v = p.eval(&prev);
        for k in (lo * steps + 1)..=(hi * steps) {
            let x = rat(k, steps);
            let v = p.eval(&x);
            if (v.is_positive() && prev_v.is_negative()) || (v.is_negative() && prev_v.is_positive())
            {
                out.push((prev.clone(), x.clone()));
            }
            prev = x;
            prev_v = v;
        }
        out
    }

    fn cubic() -> Poly {
        Poly::from_i64s(&[1, -3, -1, 1])
    }

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(rat(lo, 1), rat(hi, 1)).unwrap()
    }

    #[test]
    fn sturm_counts_match_sign_scan() {
        let scan = sign_scan(&cubic(), -10, 10, 64);
        assert_eq!(scan.len(), 3);
        assert_eq!(sturm_count(&cubic(), &iv(-10, 10)).unwrap().count, 3);
        let positive = scan.iter().filter(|(a, _)| a >= &rat(0, 1)).count();
        assert_eq!(positive, 2);
        assert_eq!(sturm_count(&cubic(), &iv(0, 10)).unwrap().count, positive);
        assert_eq!(
            sturm_count(&Poly::from_i64s(&[1, 0, 1]), &iv(-10, 10)).unwrap().count,
            0
        );
    }

    #[test]
    fn endpoint_roots_are_perturbed() {
        // x^2 - 1 on (-1, 1]: only the root 1 counts
        let p = Poly::from_i64s(&[-1, 0, 1]);
        let c = sturm_count(&p, &iv(-1, 1)).unwrap();
        assert_eq!(c.count, 1);
        assert!(c.lo_perturbed.is_some() && c.hi_perturbed.is_some());
        let lo = c.lo_perturbed.unwrap();
        assert!(lo > rat(-1, 1) && lo < rat(1, 1));
        // (1, 3]: root at 1 excluded
        assert_eq!(sturm_count(&p, &iv(1, 3)).unwrap().count, 0);
        assert_eq!(sturm_count(&p, &iv(-3, -1)).unwrap().count, 1);
    }

    #[test]
    fn isolation_of_sqrt2_and_cubic() {
        let s2 = isolate_real_roots(&Poly::from_i64s(&[-2, 0, 1])).unwrap();
        assert_eq!(s2.len(), 2);
        let r0 = refine_interval(&Poly::from_i64s(&[-2, 0, 1]), &s2[0], &rat(1, 8)).unwrap();
        let r1 = refine_interval(&Poly::from_i64s(&[-2, 0, 1]), &s2[1], &rat(1, 8)).unwrap();
        assert!(iv(-2, -1).contains_interval(&r0));
        assert!(iv(1, 2).contains_interval(&r1));

        let roots = isolate_real_roots(&cubic()).unwrap();
        assert_eq!(roots.len(), 3);
        for w in roots.windows(2) {
            assert!(w[0].hi <= w[1].lo);
        }
        let scan = sign_scan(&cubic(), -10, 10, 64);
        for (r, (a, b)) in roots.iter().zip(scan.iter()) {
            let refined = refine_interval(&cubic(), r, &rat(1, 128)).unwrap();
            assert!(refined.hi >= *a && refined.lo <= *b);
        }
        assert!(isolate_real_roots(&Poly::from_i64s(&[1, 0, 1]))
            .unwrap()
            .is_empty());
        assert!(isolate_real_roots(&Poly::zero()).is_err());
    }

    #[test]
    fn rational_roots_on_bisection_points() {
        // roots 0, 1, -1, 2 all hit dyadic midpoints
        let p = &Poly::from_i64s(&[0, -1, 0, 1]) * &Poly::from_i64s(&[-2, 1]);
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 4);
        for r in &roots {
            assert!(!p.eval(&r.lo).is_zero() && !p.eval(&r.hi).is_zero());
            assert_eq!(sturm_count(&p, r).unwrap().count, 1);
        }
    }

    #[test]
    fn refine_sqrt2_to_1024th() {
        let p = Poly::from_i64s(&[-2, 0, 1]);
        let r = refine_interval(&p, &iv(1, 2), &rat(1, 1024)).unwrap();
        assert!(r.width() <= rat(1, 1024));
        assert!(p.eval(&r.lo).is_negative() && p.eval(&r.hi).is_positive());
        let r2 = refine_interval(&p, &r, &rat(1, 2048)).unwrap();
        assert!(r.contains_interval(&r2));
    }

    #[test]
    fn negative_cubic_root_refined() {
        let roots = isolate_real_roots(&cubic()).unwrap();
        let r = refine_interval(&cubic(), &roots[0], &rat(1, 1_000_000)).unwrap();
        assert!(r.width() <= rat(1, 1_000_000));
        assert!(iv(-2, -1).contains_interval(&r));
    }

    #[test]
    fn refine_rejects_non_bracketing_interval() {
        let p = Poly::from_i64s(&[-2, 0, 1]);
        assert!(refine_interval(&p, &iv(2, 3), &rat(1, 4)).is_err());
        assert!(refine_interval(&p, &iv(1, 2), &rat(0, 1)).is_err());
    }

    fn from_roots(rs: &[i64], extra: i64) -> Poly {
        let mut p = Poly::from_i64s(&[extra, 0, 1]);
        for &r in rs {
            p = &p * &Poly::from_i64s(&[-r, 1]);
        }
        p
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn isolated_counts_sum_to_total(rs in proptest::collection::vec(-6i64..=6, 1..6), extra in 1i64..5) {
            let p = from_roots(&rs, extra);
            let mut distinct = rs.clone();
            distinct.sort();
            distinct.dedup();
            let roots = isolate_real_roots(&p).unwrap();
            proptest::prop_assert_eq!(roots.len(), distinct.len());
            let total = sturm_count(&p, &iv(-7, 7)).unwrap().count;
            let sum: usize = roots.iter().map(|r| sturm_count(&p, r).unwrap().count).sum();
            proptest::prop_assert_eq!(sum, total);
            proptest::prop_assert_eq!(total, distinct.len());
            for (r, x) in roots.iter().zip(&distinct) {
                proptest::prop_assert!(r.contains(&int(*x)));
            }
        }

        #[test]
        fn refinement_keeps_the_root(rs in proptest::collection::vec(-6i64..=6, 1..5), k in 1i64..9) {
            let p = from_roots(&rs, 2).compose(&Poly::from_i64s(&[0, 3]));
            let roots = isolate_real_roots(&p).unwrap();
            let w = rat(1, 1 << k);
            for r in &roots {
                let s = refine_interval(&p, r, &w).unwrap();
                proptest::prop_assert!(s.width() <= w);
                proptest::prop_assert!(r.contains_interval(&s));
                proptest::prop_assert_eq!(sturm_count(&p, &s).unwrap().count + usize::from(s.lo == s.hi), 1);
            }
        }
    }
}
