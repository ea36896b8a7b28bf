use std::collections::BTreeSet;
use std::sync::LazyLock;

use bicusp::{
    enumerate_elements, enumerate_words, evaluate_word, evaluate_word_at, gens_from_box, horoball_diagram, killer_test,
    reduce_mod_lattice, ComplexInterval, CuspShape, IntervalMatrix, KillerVerdict, Mat2, ParamBox, Params,
    RealInterval, Slope, Syllable, Word,
};
use num_complex::Complex;
use proptest::prelude::*;

fn iv(lo: f64, hi: f64) -> RealInterval<f64> {
    RealInterval::new(lo, hi).unwrap()
}

/// An interval and a point inside it.
fn interval_with_point() -> impl Strategy<Value = (RealInterval<f64>, f64)> {
    (-1e3..1e3f64, 0.0..10.0f64, 0.0..=1.0f64).prop_map(|(lo, w, t)| {
        let hi = lo + w;
        (iv(lo, hi), (lo + t * w).clamp(lo, hi))
    })
}

fn complex_with_point() -> impl Strategy<Value = (ComplexInterval<f64>, Complex<f64>)> {
    (interval_with_point(), interval_with_point())
        .prop_map(|((re, x), (im, y))| (ComplexInterval::new(re, im), Complex::new(x, y)))
}

fn cplx() -> impl Strategy<Value = Complex<f64>> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn params() -> impl Strategy<Value = Params<f64>> {
    (cplx(), cplx(), cplx()).prop_map(|(a, b, c)| Params::new(a, b, c))
}

/// A box of half-width `r` around `p`.
fn box_around(p: &Params<f64>, r: f64) -> ParamBox<f64> {
    let c = [p.a.re, p.a.im, p.b.re, p.b.im, p.c.re, p.c.im];
    ParamBox::root(c.map(|x| iv(x - r, x + r)))
}

fn words(max_d: u32, max_exp: u32) -> Vec<Word> {
    enumerate_words(max_d, max_exp).collect()
}

static WORDS_3_1: LazyLock<Vec<Word>> = LazyLock::new(|| words(3, 1));
static WORDS_3_2: LazyLock<Vec<Word>> = LazyLock::new(|| words(3, 2));
static WORDS_4_2: LazyLock<Vec<Word>> = LazyLock::new(|| words(4, 2));

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn real_arithmetic_contains_point_results((a, x) in interval_with_point(), (b, y) in interval_with_point()) {
        prop_assert!((a + b).contains(x + y));
        prop_assert!((a - b).contains(x - y));
        prop_assert!((a * b).contains(x * y));
        prop_assert!((-a).contains(-x));
        prop_assert!(a.sqr().contains(x * x));
        prop_assert!(a.abs().contains(x.abs()));
        if a.lo() >= 0.0 {
            prop_assert!(a.sqrt().contains(x.sqrt()));
        }
    }

    #[test]
    fn refinement_never_widens((a, x) in interval_with_point(), (b, _) in interval_with_point()) {
        // [lo, x] is a sub-interval of a
        let sub = iv(a.lo(), x);
        prop_assert!((sub + b).is_subset_of(&(a + b)));
        prop_assert!((sub * b).is_subset_of(&(a * b)));
        prop_assert!(sub.sqr().is_subset_of(&a.sqr()));
    }

    #[test]
    fn complex_arithmetic_contains_point_results((a, z) in complex_with_point(), (b, w) in complex_with_point()) {
        prop_assert!((a + b).contains(z + w));
        prop_assert!((a - b).contains(z - w));
        prop_assert!((a * b).contains(z * w));
        prop_assert!(a.conj().contains(z.conj()));
        prop_assert!(a.abs_bounds().contains(z.norm()));
    }

    #[test]
    fn modulus_lower_bound_vanishes_exactly_when_zero_is_inside((a, _) in complex_with_point(), shift in -2.0..2.0f64) {
        let b = ComplexInterval::new(a.re.hull(&RealInterval::point(shift)), a.im);
        prop_assert_eq!(a.abs_bounds().lo() == 0.0, a.contains_zero());
        prop_assert_eq!(b.abs_bounds().lo() == 0.0, b.contains_zero());
    }

    #[test]
    fn matrix_products_contain_point_products(
        e in prop::array::uniform8(complex_with_point()),
    ) {
        let m = IntervalMatrix::new(e[0].0, e[1].0, e[2].0, e[3].0);
        let n = IntervalMatrix::new(e[4].0, e[5].0, e[6].0, e[7].0);
        let pm = Mat2::new(e[0].1, e[1].1, e[2].1, e[3].1);
        let pn = Mat2::new(e[4].1, e[5].1, e[6].1, e[7].1);
        prop_assert!((m * n).contains(&(pm * pn)));
        prop_assert!(m.inv_sl2().contains(&Mat2::new(pm.d, -pm.b, -pm.c, pm.a)));
    }

    #[test]
    fn f32_arithmetic_contains_point_results(x in -100.0..100.0f32, y in -100.0..100.0f32, w in 0.0..1.0f32) {
        let a = RealInterval::new(x, x + w).unwrap();
        let b = RealInterval::point(y);
        prop_assert!((a * b).contains(x * y));
        prop_assert!((a + b).contains((x + w) + y) || (x + w) + y > (a + b).hi());
        prop_assert!((a + b).contains(x + y));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn word_matrices_have_determinant_one(p in params(), idx in 0usize..1000, r in 0.0..1e-3f64) {
        let all = &*WORDS_3_2;
        let w = &all[idx % all.len()];
        let bx = box_around(&p, r);
        let m = evaluate_word(w, &gens_from_box(&bx));
        prop_assert!(m.det().contains(Complex::new(1.0, 0.0)), "{} det {:?}", w, m.det());
        // the float route, letter by letter, lands inside the enclosure
        prop_assert!(m.contains(&evaluate_word_at(w, &p)));
    }

    #[test]
    fn killer_verdicts_survive_refinement(p in params(), idx in 0usize..1000, r in 1e-4..0.2f64, t in prop::array::uniform6(0.0..=1.0f64)) {
        let all = &*WORDS_3_1;
        let w = &all[idx % all.len()];
        let parent = box_around(&p, r);
        let child = box_around(&parent.lerp(t), r / 8.0);
        let child = ParamBox::root(std::array::from_fn(|i| {
            let (c, q) = (child.coords()[i], parent.coords()[i]);
            iv(c.lo().max(q.lo()), c.hi().min(q.hi()))
        }));
        if killer_test(w, &parent) == KillerVerdict::Eliminates {
            prop_assert_eq!(killer_test(w, &child), KillerVerdict::Eliminates);
        }
        if killer_test(w, &child) == KillerVerdict::Inconclusive {
            prop_assert_eq!(killer_test(w, &parent), KillerVerdict::Inconclusive);
        }
    }

    #[test]
    fn area_and_short_slope_lengths_are_basis_independent(
        a in cplx(), b in cplx(), (p, q, r, s) in prop::sample::select(vec![(1i64, 1i64, 0i64, 1i64), (2, 1, 1, 1), (1, -1, 0, 1), (0, 1, 1, 0), (3, 2, 1, 1)])
    ) {
        prop_assume!((a.conj() * b).im.abs() > 0.5);
        let s1 = CuspShape::new(a, b).unwrap();
        let a2 = a * p as f64 + b * q as f64;
        let b2 = a * r as f64 + b * s as f64;
        let s2 = CuspShape::new(a2, b2).unwrap();
        prop_assert!((s1.area() - s2.area()).abs() < 1e-9 * s1.area());
        let lengths = |sh: &CuspShape<f64>| -> Vec<f64> { sh.short_slopes(4.0).unwrap().into_iter().map(|(_, l)| l).collect() };
        let (l1, l2) = (lengths(&s1), lengths(&s2));
        // a slope right at the cutoff may fall either side after rounding
        let near = |l: &[f64]| l.iter().filter(|x| (**x - 4.0).abs() < 1e-9).count();
        prop_assert!(l1.len().abs_diff(l2.len()) <= near(&l1).max(near(&l2)));
        for (x, y) in l1.iter().zip(&l2) {
            prop_assert!((x - y).abs() < 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn short_slopes_match_a_brute_force_window(re in -2.0..2.0f64, im in 0.5..3.0f64, scale in 1.0..2.0f64, len in 1.0..8.0f64) {
        let (a, b) = (Complex::new(scale, 0.0), Complex::new(re, im) * scale);
        let shape = CuspShape::new(a, b).unwrap();
        let got: BTreeSet<(i64, i64)> = shape.short_slopes(len).unwrap().into_iter().map(|(s, _)| (s.p, s.q)).collect();
        let mut want = BTreeSet::new();
        for p in -60i64..=60 {
            for q in -60i64..=60 {
                let v = a * p as f64 + b * q as f64;
                if (p, q) != (0, 0) && v.norm() <= len {
                    if let Ok(s) = Slope::new(p, q) {
                        want.insert((s.p, s.q));
                    }
                }
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn horoball_centers_follow_translations(p in params(), k in -3i32..=3) {
        prop_assume!((p.a.conj() * p.b).im.abs() > 0.5 && p.c.norm() > 0.1);
        let els = enumerate_elements(&p, 2).unwrap();
        let shape = CuspShape::new(p.a, p.b).unwrap();
        let shift = Mat2::translation(p.a * k as f64);
        for e in els.iter().filter(|e| e.lower_left().norm() > 1e-6) {
            let centre = e.matrix.a / e.matrix.c;
            let moved = shift * e.matrix;
            prop_assert!(((moved.a / moved.c) - (centre + p.a * k as f64)).norm() < 1e-9 * (1.0 + centre.norm()));
            let (s1, t1) = reduce_mod_lattice(&shape, centre);
            let (s2, t2) = reduce_mod_lattice(&shape, moved.a / moved.c);
            let wrap = |d: f64| (d - d.round()).abs();
            prop_assert!(wrap(s1 - s2) < 1e-6 && wrap(t1 - t2) < 1e-6);
        }
    }

    #[test]
    fn horoball_diameters_agree_with_the_upper_half_space_action(p in params(), z in prop::array::uniform3(cplx())) {
        prop_assume!((p.a.conj() * p.b).im.abs() > 0.5);
        for e in enumerate_elements(&p, 2).unwrap().iter().filter(|e| e.lower_left().norm() > 1e-3) {
            let q = e.matrix.a / e.matrix.c;
            let expected = 1.0 / e.lower_left().norm_sqr();
            for &zi in &z {
                // images of the height-1 horosphere lie on the sphere of diameter D tangent at q
                let (w, t) = e.matrix.apply_upper_half_space(zi, 1.0);
                let d = ((w - q).norm_sqr() + t * t) / t;
                prop_assert!((d - expected).abs() < 1e-6 * expected.max(1.0), "{} vs {}", d, expected);
            }
        }
    }

    #[test]
    fn inverse_pairs_share_a_volume_bound(idx in 0usize..10_000) {
        let all = &*WORDS_4_2;
        let w = &all[idx % all.len()];
        if let Some(inv) = w.normal_inverse() {
            prop_assert_eq!(inv.volume_bound(), w.volume_bound());
            prop_assert_eq!(inv.normal_inverse(), Some(w.clone()));
        }
    }
}

/// Brute-force enumeration of syllable sequences, kept only when the text
/// form round-trips and the inverse (if it is a word) does not sort first.
fn brute_force_words(max_d: u32, max_exp: i32) -> BTreeSet<String> {
    fn text(s: &[Syllable]) -> String {
        let mut parts = Vec::new();
        for x in s {
            for (l, e) in [('x', x.m), ('y', x.n), ('z', x.e)] {
                match e {
                    0 => {}
                    1 => parts.push(l.to_string()),
                    _ => parts.push(format!("{l}^{e}")),
                }
            }
        }
        parts.join(" ")
    }
    fn inverse_text(s: &[Syllable]) -> String {
        let mut letters: Vec<(char, i32)> = Vec::new();
        for x in s {
            for (l, e) in [('x', x.m), ('y', x.n), ('z', x.e)] {
                if e != 0 {
                    letters.push((l, e));
                }
            }
        }
        letters.reverse();
        letters
            .into_iter()
            .map(|(l, e)| if e == -1 { l.to_string() } else { format!("{l}^{}", -e) })
            .collect::<Vec<_>>()
            .join(" ")
    }
    fn rec(prefix: &mut Vec<Syllable>, d: u32, max_d: u32, max_exp: i32, out: &mut BTreeSet<String>) {
        if !prefix.is_empty() {
            let first = prefix[0];
            let last = *prefix.last().unwrap();
            let trivial_first = first.m == 0 && first.n == 0;
            let cancels = prefix.len() > 1 && trivial_first && first.e.signum() != last.e.signum();
            if !cancels {
                let w: Word = text(prefix).parse().unwrap();
                let keep = match inverse_text(prefix).parse::<Word>() {
                    Ok(inv) if trivial_first => w <= inv,
                    _ => true,
                };
                if keep {
                    out.insert(w.to_string());
                }
            }
        }
        for m in -max_exp..=max_exp {
            for n in -max_exp..=max_exp {
                if !prefix.is_empty() && m == 0 && n == 0 {
                    continue;
                }
                for e in (-max_exp..=max_exp).filter(|&e| e != 0) {
                    if d + e.unsigned_abs() > max_d {
                        continue;
                    }
                    prefix.push(Syllable::new(m, n, e));
                    rec(prefix, d + e.unsigned_abs(), max_d, max_exp, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(&mut Vec::new(), 0, max_d, max_exp, &mut out);
    out
}

#[test]
fn enumeration_matches_brute_force() {
    for (max_d, max_exp) in [(1, 1), (2, 1), (3, 1), (2, 2)] {
        let got: Vec<Word> = words(max_d, max_exp);
        let texts: Vec<String> = got.iter().map(Word::to_string).collect();
        let set: BTreeSet<String> = texts.iter().cloned().collect();
        assert_eq!(set.len(), texts.len(), "duplicates for ({max_d}, {max_exp})");
        assert_eq!(set, brute_force_words(max_d, max_exp as i32), "({max_d}, {max_exp})");
        assert!(got.windows(2).all(|w| w[0] < w[1]), "not sorted for ({max_d}, {max_exp})");
    }
}

#[test]
fn one_z_letter_words_are_the_translates_of_z() {
    // r z^{±1} with |m|, |n| ≤ 1: nine translations, z^-1 being the inverse of z
    let got = words(1, 1);
    assert_eq!(got.len(), 17);
    assert!(got.iter().all(|w| w.z_count() == 1));
}

#[test]
fn diagram_balls_are_distinct_mod_the_lattice() {
    let p = Params::new(Complex::new(4.0, 0.0), Complex::new(1.0, 3f64.sqrt()), Complex::new(2.0, 0.0));
    let d = horoball_diagram(&p, 0.05, 6).unwrap();
    for (i, u) in d.balls.iter().enumerate() {
        for v in &d.balls[i + 1..] {
            let (s1, t1) = reduce_mod_lattice(&d.lattice, u.center);
            let (s2, t2) = reduce_mod_lattice(&d.lattice, v.center);
            let same = (s1 - s2).abs() < 1e-9 && (t1 - t2).abs() < 1e-9 && (u.diameter - v.diameter).abs() < 1e-9;
            assert!(!same, "{u:?} and {v:?}");
        }
    }
}
