//! Words in `(⟨x⟩ × ⟨y⟩) ∗ ⟨z⟩`, their canonical enumeration, and the
//! killer-word test on parameter boxes.
//!
//! A word is stored as syllables `x^m y^n z^e`; the first syllable's `x^m y^n`
//! part may be trivial, every later one may not, and every `e` is nonzero. So a
//! word always ends in a power of `z`, and `d(w) = Σ|e|` counts its z-letters.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bicuspid::{GeneratorTriple, ParamBox, Params};
use crate::error::{Error, Result};
use crate::interval::{IntervalMatrix, RealInterval};
use crate::mobius::Mat2;
use crate::scalar::Scalar;

/// `x^m y^n z^e`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub m: i32,
    pub n: i32,
    pub e: i32,
}

impl Syllable {
    pub const fn new(m: i32, n: i32, e: i32) -> Self {
        Self { m, n, e }
    }

    pub fn has_translation(&self) -> bool {
        self.m != 0 || self.n != 0
    }
}

/// Position of an exponent in the canonical order: 0, 1, −1, 2, −2, …
fn exp_key(v: i32) -> u32 {
    2 * v.unsigned_abs() - u32::from(v > 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn new(syllables: Vec<Syllable>) -> Result<Self> {
        let bad = |detail: &str| Err(Error::Parse { what: "word", detail: detail.to_string() });
        if syllables.is_empty() {
            return bad("a word needs at least one z-syllable");
        }
        if syllables.iter().any(|s| s.e == 0) {
            return bad("z exponents must be nonzero");
        }
        if syllables[1..].iter().any(|s| !s.has_translation()) {
            return bad("only the first syllable may have a trivial x^m y^n part");
        }
        let first = syllables[0];
        let last = syllables[syllables.len() - 1];
        if syllables.len() > 1 && !first.has_translation() && first.e.signum() != last.e.signum() {
            return bad("not cyclically reduced: z-powers of opposite sign meet across the ends");
        }
        Ok(Self { syllables })
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// `d(w)`, the number of z-letters.
    pub fn z_count(&self) -> u32 {
        self.syllables.iter().map(|s| s.e.unsigned_abs()).sum()
    }

    /// `Σ |m_i| + |n_i| + |e_i|`.
    pub fn exponent_sum(&self) -> u32 {
        self.syllables.iter().map(|s| s.m.unsigned_abs() + s.n.unsigned_abs() + s.e.unsigned_abs()).sum()
    }

    pub fn max_exponent(&self) -> u32 {
        self.syllables
            .iter()
            .map(|s| s.m.unsigned_abs().max(s.n.unsigned_abs()).max(s.e.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// The inverse, when it again has normal form (first syllable trivial).
    pub fn normal_inverse(&self) -> Option<Word> {
        if self.syllables[0].has_translation() {
            return None;
        }
        let k = self.syllables.len();
        let mut inv = Vec::with_capacity(k);
        inv.push(Syllable::new(0, 0, -self.syllables[k - 1].e));
        for i in (1..k).rev() {
            let s = self.syllables[i];
            inv.push(Syllable::new(-s.m, -s.n, -self.syllables[i - 1].e));
        }
        Some(Word { syllables: inv })
    }

    fn lex_key(&self) -> impl Iterator<Item = u32> + '_ {
        self.syllables.iter().flat_map(|s| [exp_key(s.m), exp_key(s.n), exp_key(s.e)])
    }

    /// Whether this word stands for its `{w, w⁻¹}` pair.
    pub fn is_pair_representative(&self) -> bool {
        match self.normal_inverse() {
            Some(inv) => self.cmp(&inv) != Ordering::Greater,
            None => true,
        }
    }

    /// `d(w)` as a `VolumeBound`.
    pub fn volume_bound(&self) -> VolumeBound {
        volume_bound(self)
    }
}

/// Canonical order: `d(w)`, then exponent sum, then lexicographic on the
/// syllable exponents under 0 < 1 < −1 < 2 < −2 < …
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.z_count()
            .cmp(&other.z_count())
            .then(self.exponent_sum().cmp(&other.exponent_sum()))
            .then_with(|| self.lex_key().cmp(other.lex_key()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, letter: char, exp: i32, sep: &mut bool) -> fmt::Result {
    if exp == 0 {
        return Ok(());
    }
    if *sep {
        f.write_str(" ")?;
    }
    *sep = true;
    if exp == 1 {
        write!(f, "{letter}")
    } else {
        write!(f, "{letter}^{exp}")
    }
}

/// Space-separated powers, e.g. `x^2 y^-1 z x z^-1`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sep = false;
        for s in &self.syllables {
            write_power(f, 'x', s.m, &mut sep)?;
            write_power(f, 'y', s.n, &mut sep)?;
            write_power(f, 'z', s.e, &mut sep)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse { what: "word", detail };
        let mut syllables = Vec::new();
        let (mut m, mut n) = (0i32, 0i32);
        let mut pending_z: Option<i32> = None;
        for tok in s.split_whitespace() {
            let mut chars = tok.chars();
            let letter = chars.next().ok_or_else(|| bad("empty token".into()))?;
            let rest = chars.as_str();
            let exp: i32 = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .and_then(|e| e.parse().ok())
                    .ok_or_else(|| bad(format!("bad exponent in {tok:?}")))?
            };
            if exp == 0 {
                return Err(bad(format!("zero exponent in {tok:?}")));
            }
            match letter {
                'x' | 'y' => {
                    if let Some(e) = pending_z.take() {
                        syllables.push(Syllable::new(m, n, e));
                        (m, n) = (0, 0);
                    }
                    let slot = if letter == 'x' { &mut m } else { &mut n };
                    *slot = slot.checked_add(exp).ok_or_else(|| bad("exponent overflow".into()))?;
                }
                'z' => {
                    let e = pending_z.unwrap_or(0).checked_add(exp).ok_or_else(|| bad("exponent overflow".into()))?;
                    if e == 0 {
                        return Err(bad(format!("{s:?} is not reduced")));
                    }
                    pending_z = Some(e);
                }
                _ => return Err(bad(format!("unknown letter in {tok:?}"))),
            }
        }
        match pending_z {
            Some(e) => syllables.push(Syllable::new(m, n, e)),
            None => return Err(bad(format!("{s:?} does not end in a power of z"))),
        }
        Word::new(syllables)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every cyclically reduced word with `d(w) ≤ max_d` and all exponents at most
/// `max_exp` in absolute value, one per inverse pair, in canonical order.
pub fn enumerate_words(max_d: u32, max_exp: u32) -> WordStream {
    WordStream::new(max_d, max_exp)
}

/// Lazy depth-first generator behind [`enumerate_words`].
///
/// Words are produced bucket by bucket, a bucket being a fixed `(d, exponent
/// sum)`. Inside a bucket the choice lists are sorted by key, so depth-first
/// order is the lexicographic order.
#[derive(Debug, Clone)]
pub struct WordStream {
    max_d: u32,
    max_exp: u32,
    r_first: Vec<(i32, i32)>,
    r_inner: Vec<(i32, i32)>,
    exps: Vec<i32>,
    d: u32,
    sum: u32,
    stack: Vec<usize>,
    fresh: bool,
}

impl WordStream {
    fn new(max_d: u32, max_exp: u32) -> Self {
        let me = max_exp as i32;
        let mut exps: Vec<i32> = (-me..=me).filter(|&e| e != 0).collect();
        exps.sort_by_key(|&e| exp_key(e));
        let mut r_first: Vec<(i32, i32)> = (-me..=me).flat_map(|m| (-me..=me).map(move |n| (m, n))).collect();
        r_first.sort_by_key(|&(m, n)| (exp_key(m), exp_key(n)));
        let r_inner = r_first.iter().copied().filter(|&r| r != (0, 0)).collect();
        Self { max_d, max_exp, r_first, r_inner, exps, d: 1, sum: 1, stack: Vec::new(), fresh: true }
    }

    fn max_sum(&self, d: u32) -> u32 {
        d + 2 * self.max_exp * d
    }

    fn cost(&self, pos: usize, idx: usize) -> (u32, u32) {
        if pos % 2 == 1 {
            let e = self.exps[idx].unsigned_abs();
            (e, e)
        } else {
            let (m, n) = if pos == 0 { self.r_first[idx] } else { self.r_inner[idx] };
            (0, m.unsigned_abs() + n.unsigned_abs())
        }
    }

    fn choices(&self, pos: usize) -> usize {
        match pos {
            0 => self.r_first.len(),
            p if p % 2 == 0 => self.r_inner.len(),
            _ => self.exps.len(),
        }
    }

    fn used(&self) -> (u32, u32) {
        self.stack
            .iter()
            .enumerate()
            .map(|(pos, &idx)| self.cost(pos, idx))
            .fold((0, 0), |(a, b), (c, d)| (a + c, b + d))
    }

    /// Can the prefix ending at `pos` still be completed within the bucket?
    fn viable(&self, pos: usize, used_d: u32, used_s: u32) -> bool {
        if used_d > self.d || used_s > self.sum {
            return false;
        }
        let rem_d = self.d - used_d;
        let rem_s = self.sum - used_s;
        let span = 2 * self.max_exp;
        if pos % 2 == 1 {
            if rem_d == 0 {
                rem_s == 0
            } else {
                rem_s > rem_d && rem_s <= rem_d + span * rem_d
            }
        } else {
            rem_d >= 1 && rem_s >= rem_d && rem_s <= rem_d + span * (rem_d - 1)
        }
    }

    fn first_viable(&self, pos: usize, start: usize) -> Option<usize> {
        let (ud, us) = self.used();
        (start..self.choices(pos)).find(|&idx| {
            let (cd, cs) = self.cost(pos, idx);
            self.viable(pos, ud + cd, us + cs)
        })
    }

    fn is_complete(&self) -> bool {
        self.stack.len().is_multiple_of(2) && !self.stack.is_empty() && self.used() == (self.d, self.sum)
    }

    fn current(&self) -> Vec<Syllable> {
        self.stack
            .chunks(2)
            .enumerate()
            .map(|(i, pair)| {
                let (m, n) = if i == 0 { self.r_first[pair[0]] } else { self.r_inner[pair[0]] };
                Syllable::new(m, n, self.exps[pair[1]])
            })
            .collect()
    }

    /// Next complete prefix in the current bucket, in depth-first order.
    fn next_in_bucket(&mut self) -> Option<Word> {
        let mut extend = true;
        loop {
            if extend {
                let pos = self.stack.len();
                if let Some(idx) = self.first_viable(pos, 0) {
                    self.stack.push(idx);
                    if let Some(w) = self.emit() {
                        return Some(w);
                    }
                    continue;
                }
            }
            let idx = self.stack.pop()?;
            let pos = self.stack.len();
            match self.first_viable(pos, idx + 1) {
                Some(next) => {
                    self.stack.push(next);
                    extend = true;
                    if let Some(w) = self.emit() {
                        return Some(w);
                    }
                }
                None => extend = false,
            }
        }
    }

    fn emit(&self) -> Option<Word> {
        if !self.is_complete() {
            return None;
        }
        let w = Word::new(self.current()).ok()?;
        w.is_pair_representative().then_some(w)
    }
}

impl Iterator for WordStream {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        while self.d <= self.max_d {
            if self.fresh {
                self.stack.clear();
                self.fresh = false;
            }
            if let Some(w) = self.next_in_bucket() {
                return Some(w);
            }
            self.fresh = true;
            self.sum += 1;
            if self.sum > self.max_sum(self.d) {
                self.d += 1;
                self.sum = self.d;
            }
        }
        None
    }
}

/// Multiplies enclosures of `x^m y^n` and `z^e` for a fixed set of generators,
/// caching the powers of `γ` and the partial products of the previous word.
///
/// Consecutive words of the canonical stream share long prefixes, so most
/// evaluations only multiply out the last syllable or two. The products are
/// formed left to right either way, so caching does not change any bound.
#[derive(Debug, Clone)]
pub struct WordEvaluator<T> {
    gens: GeneratorTriple<T>,
    gamma_pows: Vec<IntervalMatrix<T>>,
    gamma_inv_pows: Vec<IntervalMatrix<T>>,
    /// `prefix[i]` is the product of the first `i + 1` syllables of the last word.
    prefix: Vec<(Syllable, IntervalMatrix<T>)>,
}

impl<T: Scalar> WordEvaluator<T> {
    pub fn new(gens: GeneratorTriple<T>) -> Self {
        let gi = gens.gamma.inv_sl2();
        Self { gens, gamma_pows: vec![gens.gamma], gamma_inv_pows: vec![gi], prefix: Vec::new() }
    }

    pub fn generators(&self) -> &GeneratorTriple<T> {
        &self.gens
    }

    fn gamma_power(&mut self, e: i32) -> IntervalMatrix<T> {
        let k = e.unsigned_abs() as usize;
        let (pows, base) = if e > 0 {
            (&mut self.gamma_pows, self.gens.gamma)
        } else {
            (&mut self.gamma_inv_pows, self.gens.gamma.inv_sl2())
        };
        while pows.len() < k {
            let next = pows[pows.len() - 1].mul(&base);
            pows.push(next);
        }
        pows[k - 1]
    }

    /// Enclosure of `W(a, b, c)` over every parameter the generators enclose.
    pub fn evaluate(&mut self, w: &Word) -> IntervalMatrix<T> {
        let syl = w.syllables();
        let shared = self.prefix.iter().zip(syl).take_while(|((a, _), b)| a == *b).count();
        self.prefix.truncate(shared);
        for s in &syl[shared..] {
            let mut acc = self.prefix.last().map(|(_, m)| *m);
            if s.has_translation() {
                let t = self.gens.a().scale(s.m as i64) + self.gens.b().scale(s.n as i64);
                let f = IntervalMatrix::translation(t);
                acc = Some(acc.map_or(f, |m| m.mul(&f)));
            }
            let g = self.gamma_power(s.e);
            self.prefix.push((*s, acc.map_or(g, |m| m.mul(&g))));
        }
        self.prefix.last().map_or_else(IntervalMatrix::identity, |(_, m)| *m)
    }

    pub fn lower_left_abs(&mut self, w: &Word) -> RealInterval<T> {
        self.evaluate(w).m21.abs_bounds()
    }

    pub fn killer_test(&mut self, w: &Word) -> KillerVerdict {
        KillerVerdict::classify(&self.lower_left_abs(w))
    }
}

/// Left-to-right interval product of the word in the given generators.
pub fn evaluate_word<T: Scalar>(w: &Word, gens: &GeneratorTriple<T>) -> IntervalMatrix<T> {
    WordEvaluator::new(*gens).evaluate(w)
}

/// Enclosure of `|p(a, b, c)|`, the modulus of the lower-left entry, over `bx`.
pub fn lower_left_abs<T: Scalar>(w: &Word, bx: &ParamBox<T>) -> RealInterval<T> {
    evaluate_word(w, &GeneratorTriple::from_box(bx)).m21.abs_bounds()
}

pub fn killer_test<T: Scalar>(w: &Word, bx: &ParamBox<T>) -> KillerVerdict {
    KillerVerdict::classify(&lower_left_abs(w, bx))
}

/// Floating-point `W(a, b, c)` at a point, multiplying one letter at a time.
pub fn evaluate_word_at<T: Scalar>(w: &Word, p: &Params<T>) -> Mat2<T> {
    let [alpha, beta, gamma] = p.generators();
    let letters = [(alpha, alpha.inverse_sl2()), (beta, beta.inverse_sl2()), (gamma, gamma.inverse_sl2())];
    let mut acc = Mat2::identity();
    for s in w.syllables() {
        for (k, exp) in [s.m, s.n, s.e].into_iter().enumerate() {
            let (fwd, inv) = letters[k];
            let g = if exp > 0 { fwd } else { inv };
            for _ in 0..exp.unsigned_abs() {
                acc = acc * g;
            }
        }
    }
    acc
}

/// `p(a, b, c)` at a point.
pub fn lower_left_at<T: Scalar>(w: &Word, p: &Params<T>) -> Complex<T> {
    evaluate_word_at(w, p).c
}

/// Outcome of testing one word on one box, from `[L, U] ⊇ |p|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KillerVerdict {
    /// `0 < L` and `U < 1`: no point of the box carries a normalized bicuspid group.
    Eliminates,
    /// `L = 0` and `U < 1`: any discrete bicuspid group in the box satisfies a
    /// relation derived from the word.
    CandidateRelator,
    /// `U ≥ 1`.
    Inconclusive,
}

impl KillerVerdict {
    pub fn classify<T: Scalar>(abs: &RealInterval<T>) -> Self {
        if abs.hi() >= T::one() {
            KillerVerdict::Inconclusive
        } else if abs.lo() > T::zero() {
            KillerVerdict::Eliminates
        } else {
            KillerVerdict::CandidateRelator
        }
    }
}

/// Covolume bound `π (d(w) − 2)`, kept as an integer multiple of π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VolumeBound {
    pub pi_multiple: i64,
}

impl VolumeBound {
    pub fn value(&self) -> f64 {
        PI * self.pi_multiple as f64
    }

    /// Non-positive bounds rule out finite-covolume groups.
    pub fn is_contradictory(&self) -> bool {
        self.pi_multiple <= 0
    }
}

pub fn volume_bound(w: &Word) -> VolumeBound {
    VolumeBound { pi_multiple: w.z_count() as i64 - 2 }
}
