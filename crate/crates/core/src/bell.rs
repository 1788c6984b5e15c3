//! CHSH experiments as texts over the 16-letter alphabet `a..=p`.
//!
//! The alphabet is a 4×4 grid. The row fixes the pair of measurement
//! settings, the column the two outcome bits:
//!
//! ```text
//!            00  01  10  11      settings (A, B)
//!   row 0:   a   b   c   d       (unprimed, unprimed)
//!   row 1:   e   f   g   h       (unprimed, primed)
//!   row 2:   i   j   k   l       (primed,   unprimed)
//!   row 3:   m   n   o   p       (primed,   primed)
//! ```
//!
//! Outcome `+1` is bit 0 and `−1` is bit 1, so `aeim` is the all-`+1` group.
//! `F` is `+1` when the two bits agree and `G(x₁x₂x₃x₄) = F(x₁)+F(x₂)+F(x₃)−F(x₄)`.
//!
//! # Random streams
//!
//! Simulators use `ChaCha8Rng` (rand_chacha). Groups are cut into blocks of
//! [`BLOCK_GROUPS`]; block `b` draws from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream `b`. Output therefore depends only on `(seed, n)`,
//! never on thread count or [`Execution`] policy.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::Execution;

/// Groups generated per independent random stream.
pub const BLOCK_GROUPS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("invalid letter {0:?}, expected a..=p")]
    InvalidLetter(char),
    #[error("invalid character {ch:?} at position {position}")]
    InvalidCharacter { ch: char, position: usize },
    #[error("{0:?} is not a quadruple (one letter from each row, in row order)")]
    NotInQ(String),
    #[error("no quadruples found in text")]
    NoQuadruples,
    #[error("record count {0} is not a multiple of 4")]
    GroupSizeNot4(usize),
    #[error("group {group} has settings out of order at slot {slot}")]
    WrongGroupOrder { group: usize, slot: usize },
    #[error("mixture weights must be finite, nonnegative and not all zero")]
    InvalidMixture,
    #[error("could not read text: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    Unprimed,
    Primed,
}

impl Setting {
    fn bit(self) -> usize {
        match self {
            Setting::Unprimed => 0,
            Setting::Primed => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i32 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    fn bit(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// Setting pairs in row order; also the required record order within a group.
pub const SETTING_ORDER: [(Setting, Setting); 4] = [
    (Setting::Unprimed, Setting::Unprimed),
    (Setting::Unprimed, Setting::Primed),
    (Setting::Primed, Setting::Unprimed),
    (Setting::Primed, Setting::Primed),
];

/// One letter of the alphabet, stored as `4·row + column`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter16(u8);

impl Letter16 {
    pub fn from_char(c: char) -> Result<Self, BellError> {
        if ('a'..='p').contains(&c) {
            Ok(Letter16(c as u8 - b'a'))
        } else {
            Err(BellError::InvalidLetter(c))
        }
    }

    /// `row` in 0..4, bits in {0, 1}.
    pub fn from_parts(row: usize, b1: usize, b2: usize) -> Self {
        assert!(row < 4 && b1 < 2 && b2 < 2, "letter parts out of range");
        Letter16((4 * row + 2 * b1 + b2) as u8)
    }

    pub fn all() -> impl Iterator<Item = Letter16> {
        (0..16).map(Letter16)
    }

    pub fn to_char(self) -> char {
        (b'a' + self.0) as char
    }

    pub fn row(self) -> usize {
        usize::from(self.0 / 4)
    }

    pub fn bits(self) -> (usize, usize) {
        let col = usize::from(self.0 % 4);
        (col / 2, col % 2)
    }

    pub fn settings(self) -> (Setting, Setting) {
        SETTING_ORDER[self.row()]
    }

    /// `+1` when the outcome bits agree, `−1` otherwise.
    pub fn f_value(self) -> i32 {
        let (b1, b2) = self.bits();
        if b1 == b2 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Letter16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

pub fn f_value(c: char) -> Result<i32, BellError> {
    Ok(Letter16::from_char(c)?.f_value())
}

pub type Quadruple = [Letter16; 4];

fn is_quadruple(letters: &[Letter16]) -> bool {
    letters.len() == 4 && letters.iter().enumerate().all(|(i, l)| l.row() == i)
}

fn g_of(q: &Quadruple) -> i32 {
    q[0].f_value() + q[1].f_value() + q[2].f_value() - q[3].f_value()
}

/// `G(x₁x₂x₃x₄) = F(x₁) + F(x₂) + F(x₃) − F(x₄)` for a member of `Q`.
pub fn g_value(quad: &str) -> Result<i32, BellError> {
    let letters = quad
        .chars()
        .map(Letter16::from_char)
        .collect::<Result<Vec<_>, _>>()?;
    if !is_quadruple(&letters) {
        return Err(BellError::NotInQ(quad.to_string()));
    }
    Ok(g_of(&[letters[0], letters[1], letters[2], letters[3]]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadrupleText {
    pub raw: String,
    pub quadruples: Vec<Quadruple>,
    pub skipped: usize,
}

impl QuadrupleText {
    pub fn quadruple_strings(&self) -> Vec<String> {
        self.quadruples
            .iter()
            .map(|q| q.iter().map(|l| l.to_char()).collect())
            .collect()
    }
}

/// Greedy left-to-right scan: a window in `Q` is consumed whole, anything
/// else skips one character.
pub fn regroup(text: &str) -> Result<QuadrupleText, BellError> {
    let letters = text
        .chars()
        .enumerate()
        .map(|(position, ch)| {
            Letter16::from_char(ch).map_err(|_| BellError::InvalidCharacter { ch, position })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut quadruples = Vec::with_capacity(letters.len() / 4);
    let mut skipped = 0;
    let mut i = 0;
    while i < letters.len() {
        if i + 4 <= letters.len() && is_quadruple(&letters[i..i + 4]) {
            quadruples.push([letters[i], letters[i + 1], letters[i + 2], letters[i + 3]]);
            i += 4;
        } else {
            skipped += 1;
            i += 1;
        }
    }
    Ok(QuadrupleText {
        raw: text.to_string(),
        quadruples,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshScore {
    pub mean_g: f64,
    pub n_quads: usize,
    pub skipped: usize,
}

pub fn chsh_score(text: &str) -> Result<ChshScore, BellError> {
    chsh_score_with(text, Execution::default())
}

/// `⟨G⟩` over the regrouped text. The sum is exact integer arithmetic, so
/// the result does not depend on the execution policy.
pub fn chsh_score_with(text: &str, exec: Execution) -> Result<ChshScore, BellError> {
    let grouped = regroup(text)?;
    score_quadruples(&grouped.quadruples, grouped.skipped, exec)
}

pub fn score_quadruples(quads: &[Quadruple], skipped: usize, exec: Execution) -> Result<ChshScore, BellError> {
    if quads.is_empty() {
        return Err(BellError::NoQuadruples);
    }
    let total = exec.sum_i64(quads, |q| i64::from(g_of(q)));
    Ok(ChshScore {
        mean_g: total as f64 / quads.len() as f64,
        n_quads: quads.len(),
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairRecord {
    pub setting_a: Setting,
    pub setting_b: Setting,
    pub outcome_a: Outcome,
    pub outcome_b: Outcome,
}

impl PairRecord {
    pub fn new(setting_a: Setting, setting_b: Setting, outcome_a: Outcome, outcome_b: Outcome) -> Self {
        Self { setting_a, setting_b, outcome_a, outcome_b }
    }

    pub fn letter(&self) -> Letter16 {
        let row = 2 * self.setting_a.bit() + self.setting_b.bit();
        Letter16::from_parts(row, self.outcome_a.bit(), self.outcome_b.bit())
    }

    pub fn from_letter(letter: Letter16) -> Self {
        let (setting_a, setting_b) = letter.settings();
        let (b1, b2) = letter.bits();
        Self::new(setting_a, setting_b, Outcome::from_bit(b1), Outcome::from_bit(b2))
    }

    pub fn product(&self) -> i32 {
        self.outcome_a.value() * self.outcome_b.value()
    }
}

/// One record per setting pair, in [`SETTING_ORDER`].
pub type PairGroup = [PairRecord; 4];

/// Concatenates record letters; the records must come in complete groups
/// ordered as [`SETTING_ORDER`].
pub fn encode_pairs(records: &[PairRecord]) -> Result<String, BellError> {
    if !records.len().is_multiple_of(4) {
        return Err(BellError::GroupSizeNot4(records.len()));
    }
    for (group, chunk) in records.chunks(4).enumerate() {
        for (slot, (r, &(sa, sb))) in chunk.iter().zip(&SETTING_ORDER).enumerate() {
            if r.setting_a != sa || r.setting_b != sb {
                return Err(BellError::WrongGroupOrder { group, slot });
            }
        }
    }
    Ok(records.iter().map(|r| r.letter().to_char()).collect())
}

pub fn encode_groups(groups: &[PairGroup]) -> String {
    encode_pairs(groups.as_flattened()).expect("groups are built in setting order")
}

/// Letter-by-letter inverse of [`encode_pairs`].
pub fn decode_pairs(text: &str) -> Result<Vec<PairRecord>, BellError> {
    text.chars()
        .enumerate()
        .map(|(position, ch)| {
            Letter16::from_char(ch)
                .map(PairRecord::from_letter)
                .map_err(|_| BellError::InvalidCharacter { ch, position })
        })
        .collect()
}

/// Reads a letter text file, dropping all whitespace.
pub fn read_text(path: impl AsRef<Path>) -> Result<String, BellError> {
    let raw = std::fs::read_to_string(path).map_err(|e| BellError::Io(e.to_string()))?;
    Ok(raw.chars().filter(|c| !c.is_whitespace()).collect())
}

/// Writes a letter text with a newline every `width` characters.
pub fn wrap_text(text: &str, width: usize) -> String {
    let mut out = String::with_capacity(text.len() + text.len() / width.max(1) + 1);
    for (i, ch) in text.chars().enumerate() {
        if i > 0 && width > 0 && i % width == 0 {
            out.push('\n');
        }
        out.push(ch);
    }
    out.push('\n');
    out
}

/// Measurement angles in degrees: `(A, A′, B, B′)`.
pub const QUANTUM_ANGLES_DEG: [f64; 4] = [0.0, 90.0, 45.0, -45.0];

/// Correlation `E = cos(θ_a − θ_b)` of the quantum source for a setting pair.
pub fn quantum_correlation(setting_a: Setting, setting_b: Setting) -> f64 {
    let a = QUANTUM_ANGLES_DEG[setting_a.bit()];
    let b = QUANTUM_ANGLES_DEG[2 + setting_b.bit()];
    (a - b).to_radians().cos()
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn simulate_blocks<F>(n_groups: usize, seed: u64, exec: Execution, fill: F) -> Vec<PairGroup>
where
    F: Fn(&mut ChaCha8Rng) -> PairGroup + Sync + Send,
{
    let blocks = n_groups.div_ceil(BLOCK_GROUPS);
    exec.map_range(blocks, |b| {
        let mut rng = block_rng(seed, b);
        let len = BLOCK_GROUPS.min(n_groups - b * BLOCK_GROUPS);
        (0..len).map(|_| fill(&mut rng)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

pub fn simulate_quantum(n_groups: usize, seed: u64) -> Vec<PairGroup> {
    simulate_quantum_with(n_groups, seed, Execution::default())
}

/// Draws each record's outcomes with `P(o₁, o₂) = (1 + o₁o₂E)/4`.
pub fn simulate_quantum_with(n_groups: usize, seed: u64, exec: Execution) -> Vec<PairGroup> {
    let agree: [f64; 4] = SETTING_ORDER.map(|(a, b)| 0.5 * (1.0 + quantum_correlation(a, b)));
    simulate_blocks(n_groups, seed, exec, |rng| {
        std::array::from_fn(|slot| {
            let (sa, sb) = SETTING_ORDER[slot];
            let same = rng.random::<f64>() < agree[slot];
            let o1 = if rng.random::<bool>() { Outcome::Plus } else { Outcome::Minus };
            let o2 = match (same, o1) {
                (true, o) => o,
                (false, Outcome::Plus) => Outcome::Minus,
                (false, Outcome::Minus) => Outcome::Plus,
            };
            PairRecord::new(sa, sb, o1, o2)
        })
    })
}

/// A deterministic local assignment of outcomes to the four settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalStrategy {
    pub a: Outcome,
    pub a_primed: Outcome,
    pub b: Outcome,
    pub b_primed: Outcome,
}

impl LocalStrategy {
    pub fn new(a: Outcome, a_primed: Outcome, b: Outcome, b_primed: Outcome) -> Self {
        Self { a, a_primed, b, b_primed }
    }

    /// All 16 strategies, indexed by the bits of `0..16` in `(A, A′, B, B′)` order.
    pub fn all() -> [LocalStrategy; 16] {
        std::array::from_fn(Self::from_index)
    }

    fn from_index(i: usize) -> Self {
        let o = |shift: usize| Outcome::from_bit((i >> shift) & 1);
        Self::new(o(3), o(2), o(1), o(0))
    }

    /// Parses four signs such as `"++-+"` in `(A, A′, B, B′)` order.
    pub fn parse(signs: &str) -> Option<Self> {
        let o: Vec<Outcome> = signs
            .chars()
            .map(|c| match c {
                '+' => Some(Outcome::Plus),
                '-' => Some(Outcome::Minus),
                _ => None,
            })
            .collect::<Option<_>>()?;
        (o.len() == 4).then(|| Self::new(o[0], o[1], o[2], o[3]))
    }

    pub fn group(&self) -> PairGroup {
        SETTING_ORDER.map(|(sa, sb)| {
            let oa = if sa == Setting::Unprimed { self.a } else { self.a_primed };
            let ob = if sb == Setting::Unprimed { self.b } else { self.b_primed };
            PairRecord::new(sa, sb, oa, ob)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalSource {
    /// Every group uses the same strategy.
    Fixed(LocalStrategy),
    /// Each group samples a strategy with the given weights.
    Mixture(Vec<(LocalStrategy, f64)>),
    /// Each group samples one of the 16 strategies uniformly.
    Uniform,
}

impl ClassicalSource {
    pub fn mixture(weights: Vec<(LocalStrategy, f64)>) -> Result<Self, BellError> {
        let ok = weights.iter().all(|(_, w)| w.is_finite() && *w >= 0.0)
            && weights.iter().map(|(_, w)| w).sum::<f64>() > 0.0;
        if ok {
            Ok(ClassicalSource::Mixture(weights))
        } else {
            Err(BellError::InvalidMixture)
        }
    }
}

pub fn simulate_classical(n_groups: usize, seed: u64, source: &ClassicalSource) -> Vec<PairGroup> {
    simulate_classical_with(n_groups, seed, source, Execution::default())
}

/// Local hidden-variable source: outcomes are read off the sampled strategy.
pub fn simulate_classical_with(
    n_groups: usize,
    seed: u64,
    source: &ClassicalSource,
    exec: Execution,
) -> Vec<PairGroup> {
    let all = LocalStrategy::all();
    let cumulative: Vec<(LocalStrategy, f64)> = match source {
        ClassicalSource::Mixture(w) => {
            let total: f64 = w.iter().map(|(_, x)| x).sum();
            let mut acc = 0.0;
            w.iter()
                .map(|&(s, x)| {
                    acc += x / total;
                    (s, acc)
                })
                .collect()
        }
        _ => Vec::new(),
    };
    simulate_blocks(n_groups, seed, exec, |rng| match source {
        ClassicalSource::Fixed(s) => s.group(),
        ClassicalSource::Uniform => all[rng.random_range(0..16)].group(),
        ClassicalSource::Mixture(_) => {
            let u: f64 = rng.random();
            let pick = cumulative
                .iter()
                .find(|(_, c)| u < *c)
                .or(cumulative.last())
                .expect("validated non-empty mixture");
            pick.0.group()
        }
    })
}

/// Empirical `E(x, y)` per setting pair, in [`SETTING_ORDER`].
pub fn correlations(groups: &[PairGroup]) -> [f64; 4] {
    let mut sums = [0i64; 4];
    for g in groups {
        for (slot, r) in g.iter().enumerate() {
            sums[slot] += i64::from(r.product());
        }
    }
    sums.map(|s| s as f64 / groups.len().max(1) as f64)
}
