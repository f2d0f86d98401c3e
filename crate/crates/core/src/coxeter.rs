//! Normal forms in the graph product `(Z_qi × Z_qj) * Z_qk`.
//!
//! The chambers of a semiregular right-angled building of type
//! `⟨i,j,k | i² = j² = k² = (ij)² = 1⟩` are modelled as elements of this
//! graph product. Each element has a unique reduced word in which commuting
//! syllables appear in the fixed generator order `i < j < k`; that word is a
//! [`ChamberWord`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("colour {colour} out of range for generator {gen} (thickness {q})")]
    ColourOutOfRange { gen: Gen, colour: u32, q: u32 },
    #[error("thickness of generator {gen} must be finite and at least 3, got {q}")]
    ThinPanel { gen: Gen, q: u32 },
    #[error("syllable sequence is not in normal form at position {0}")]
    NotNormal(usize),
}

/// A generator of the Coxeter system. The derived order is the fixed
/// canonical order `i < j < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gen {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "j")]
    J,
    #[serde(rename = "k")]
    K,
}

impl Gen {
    pub const ALL: [Gen; 3] = [Gen::I, Gen::J, Gen::K];

    pub fn name(self) -> &'static str {
        match self {
            Gen::I => "i",
            Gen::J => "j",
            Gen::K => "k",
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gen {
    type Err = CoxeterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i" => Ok(Gen::I),
            "j" => Ok(Gen::J),
            "k" => Ok(Gen::K),
            other => Err(CoxeterError::UnknownGenerator(other.to_string())),
        }
    }
}

/// The right-angled Coxeter diagram on `{i, j, k}` with `m_ij = 2` and
/// `m_ik = m_jk = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagram;

impl Diagram {
    pub fn standard() -> Self {
        Diagram
    }

    pub fn generators(&self) -> &'static [Gen] {
        &Gen::ALL
    }

    /// Coxeter matrix entry; `None` stands for `∞`.
    pub fn coxeter_entry(&self, a: Gen, b: Gen) -> Option<u32> {
        if a == b {
            Some(1)
        } else if self.commutes(a, b) {
            Some(2)
        } else {
            None
        }
    }

    /// True for distinct commuting generators.
    pub fn commutes(&self, a: Gen, b: Gen) -> bool {
        matches!((a, b), (Gen::I, Gen::J) | (Gen::J, Gen::I))
    }

    /// A generator set is spherical when its members pairwise commute, i.e.
    /// when the residues of that type are finite.
    pub fn is_spherical(&self, gens: &[Gen]) -> bool {
        gens.iter()
            .enumerate()
            .all(|(n, &a)| gens[n + 1..].iter().all(|&b| a == b || self.commutes(a, b)))
    }
}

/// Panel sizes `(q_i, q_j, q_k)`. Every entry is at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct Thickness {
    q: [u32; 3],
}

impl Thickness {
    pub fn new(qi: u32, qj: u32, qk: u32) -> Result<Self, CoxeterError> {
        for (gen, q) in Gen::ALL.into_iter().zip([qi, qj, qk]) {
            if q < 3 {
                return Err(CoxeterError::ThinPanel { gen, q });
            }
        }
        Ok(Thickness { q: [qi, qj, qk] })
    }

    pub fn q(&self, g: Gen) -> u32 {
        self.q[g as usize]
    }

    pub fn as_array(&self) -> [u32; 3] {
        self.q
    }
}

impl TryFrom<[u32; 3]> for Thickness {
    type Error = CoxeterError;

    fn try_from(q: [u32; 3]) -> Result<Self, Self::Error> {
        Thickness::new(q[0], q[1], q[2])
    }
}

impl From<Thickness> for [u32; 3] {
    fn from(t: Thickness) -> Self {
        t.q
    }
}

impl fmt::Display for Thickness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.q[0], self.q[1], self.q[2])
    }
}

/// A non-identity element `g^colour` of one cyclic factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(Gen, u32)", into = "(Gen, u32)")]
pub struct Syllable {
    pub gen: Gen,
    pub colour: u32,
}

impl Syllable {
    pub fn new(gen: Gen, colour: u32) -> Self {
        Syllable { gen, colour }
    }
}

impl From<(Gen, u32)> for Syllable {
    fn from((gen, colour): (Gen, u32)) -> Self {
        Syllable { gen, colour }
    }
}

impl From<Syllable> for (Gen, u32) {
    fn from(s: Syllable) -> Self {
        (s.gen, s.colour)
    }
}

/// One block of the free-product view of a chamber: either an element of
/// `Z_qi × Z_qj` or of `Z_qk`, never the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    Ij(u32, u32),
    K(u32),
}

impl Block {
    pub fn is_ij(&self) -> bool {
        matches!(self, Block::Ij(..))
    }
}

/// A chamber, stored as the canonical normal form of a graph-product element.
///
/// Invariants: no syllable has colour 0, no two adjacent syllables share a
/// generator, and a `j` syllable is never directly followed by an `i`
/// syllable. Ordering is shortlex (length first, then syllables).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Syllable>", into = "Vec<Syllable>")]
pub struct ChamberWord {
    syllables: Vec<Syllable>,
}

impl TryFrom<Vec<Syllable>> for ChamberWord {
    type Error = CoxeterError;

    fn try_from(syllables: Vec<Syllable>) -> Result<Self, Self::Error> {
        for (n, s) in syllables.iter().enumerate() {
            if s.colour == 0 {
                return Err(CoxeterError::NotNormal(n));
            }
            if n > 0 {
                let prev = syllables[n - 1].gen;
                if prev == s.gen || (prev == Gen::J && s.gen == Gen::I) {
                    return Err(CoxeterError::NotNormal(n));
                }
            }
        }
        Ok(ChamberWord { syllables })
    }
}

impl From<ChamberWord> for Vec<Syllable> {
    fn from(w: ChamberWord) -> Self {
        w.syllables
    }
}

impl PartialOrd for ChamberWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ChamberWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.syllables
            .len()
            .cmp(&other.syllables.len())
            .then_with(|| self.syllables.cmp(&other.syllables))
    }
}

impl fmt::Display for ChamberWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, s) in self.syllables.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", s.gen, s.colour)?;
        }
        f.write_str("]")
    }
}

impl ChamberWord {
    /// The base chamber (identity element).
    pub fn base() -> Self {
        ChamberWord::default()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn last_gen(&self) -> Option<Gen> {
        self.syllables.last().map(|s| s.gen)
    }

    /// Groups the normal form into maximal `{i,j}`-blocks and `k`-blocks.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out: Vec<Block> = Vec::with_capacity(self.syllables.len());
        for s in &self.syllables {
            match (s.gen, out.last_mut()) {
                (Gen::K, _) => out.push(Block::K(s.colour)),
                (Gen::J, Some(Block::Ij(_, b))) if *b == 0 => *b = s.colour,
                (Gen::I, _) => out.push(Block::Ij(s.colour, 0)),
                (Gen::J, _) => out.push(Block::Ij(0, s.colour)),
            }
        }
        out
    }

    pub fn block_count(&self) -> usize {
        self.blocks().len()
    }

    /// Rebuilds a word from an alternating block sequence.
    ///
    /// Returns `None` if two consecutive blocks have the same kind or a block
    /// is the identity.
    pub fn from_blocks(blocks: &[Block]) -> Option<Self> {
        let mut syllables = Vec::with_capacity(blocks.len() * 2);
        for (n, b) in blocks.iter().enumerate() {
            if n > 0 && blocks[n - 1].is_ij() == b.is_ij() {
                return None;
            }
            match *b {
                Block::Ij(0, 0) | Block::K(0) => return None,
                Block::Ij(a, c) => {
                    if a != 0 {
                        syllables.push(Syllable::new(Gen::I, a));
                    }
                    if c != 0 {
                        syllables.push(Syllable::new(Gen::J, c));
                    }
                }
                Block::K(c) => syllables.push(Syllable::new(Gen::K, c)),
            }
        }
        Some(ChamberWord { syllables })
    }

    /// Checks that every colour lies in its cyclic factor.
    pub fn fits(&self, q: &Thickness) -> bool {
        self.syllables.iter().all(|s| s.colour < q.q(s.gen))
    }

    /// The word with its trailing `gens`-syllables removed (trailing meaning
    /// movable to the end by commutations). For spherical `gens` this is the
    /// shortest representative of the coset `self·⟨gens⟩`.
    pub fn strip_trailing(&self, gens: &[Gen]) -> ChamberWord {
        let mut blocks = self.blocks();
        match blocks.last_mut() {
            Some(Block::K(_)) if gens.contains(&Gen::K) => {
                blocks.pop();
            }
            Some(Block::Ij(a, b)) => {
                if gens.contains(&Gen::I) {
                    *a = 0;
                }
                if gens.contains(&Gen::J) {
                    *b = 0;
                }
                if *a == 0 && *b == 0 {
                    blocks.pop();
                }
            }
            _ => {}
        }
        ChamberWord::from_blocks(&blocks).expect("stripping keeps alternation")
    }
}

/// Appends one syllable to a normal form, keeping it normal.
fn push_syllable(word: &mut Vec<Syllable>, s: Syllable, q: &Thickness) {
    if s.colour == 0 {
        return;
    }
    let diagram = Diagram;
    let modulus = q.q(s.gen);
    // trailing window of syllables that commute with s
    let mut start = word.len();
    while start > 0 && diagram.commutes(word[start - 1].gen, s.gen) {
        start -= 1;
    }
    if start > 0 && word[start - 1].gen == s.gen {
        let at = start - 1;
        let merged = (word[at].colour + s.colour) % modulus;
        if merged == 0 {
            word.remove(at);
        } else {
            word[at].colour = merged;
        }
        return;
    }
    let offset = word[start..].iter().filter(|t| t.gen < s.gen).count();
    word.insert(start + offset, s);
}

/// Reduces an arbitrary syllable sequence (colour 0 allowed) to its normal
/// form.
pub fn normalize<I>(raw: I, q: &Thickness) -> Result<ChamberWord, CoxeterError>
where
    I: IntoIterator<Item = (Gen, u32)>,
{
    let mut word = Vec::new();
    for (gen, colour) in raw {
        let modulus = q.q(gen);
        if colour >= modulus {
            return Err(CoxeterError::ColourOutOfRange { gen, colour, q: modulus });
        }
        push_syllable(&mut word, Syllable::new(gen, colour), q);
    }
    Ok(ChamberWord { syllables: word })
}

/// Like [`normalize`] but takes generator names as strings.
pub fn normalize_named<'a, I>(raw: I, q: &Thickness) -> Result<ChamberWord, CoxeterError>
where
    I: IntoIterator<Item = (&'a str, u32)>,
{
    let parsed = raw
        .into_iter()
        .map(|(name, c)| name.parse::<Gen>().map(|g| (g, c)))
        .collect::<Result<Vec<_>, _>>()?;
    normalize(parsed, q)
}

/// Group law of the chamber model. Both words must fit `q`.
pub fn multiply(a: &ChamberWord, b: &ChamberWord, q: &Thickness) -> Result<ChamberWord, CoxeterError> {
    for s in a.syllables.iter().chain(&b.syllables) {
        let modulus = q.q(s.gen);
        if s.colour >= modulus {
            return Err(CoxeterError::ColourOutOfRange { gen: s.gen, colour: s.colour, q: modulus });
        }
    }
    Ok(multiply_unchecked(a, b, q))
}

pub(crate) fn multiply_unchecked(a: &ChamberWord, b: &ChamberWord, q: &Thickness) -> ChamberWord {
    let mut word = a.syllables.clone();
    for s in &b.syllables {
        push_syllable(&mut word, *s, q);
    }
    ChamberWord { syllables: word }
}

/// Appends `g^colour` to `a`.
pub(crate) fn times_syllable(a: &ChamberWord, gen: Gen, colour: u32, q: &Thickness) -> ChamberWord {
    let mut word = a.syllables.clone();
    push_syllable(&mut word, Syllable::new(gen, colour % q.q(gen)), q);
    ChamberWord { syllables: word }
}

/// Group inverse: reverse the word and negate every colour.
pub fn invert(a: &ChamberWord, q: &Thickness) -> ChamberWord {
    let mut word = Vec::with_capacity(a.len());
    for s in a.syllables.iter().rev() {
        let modulus = q.q(s.gen);
        push_syllable(&mut word, Syllable::new(s.gen, (modulus - s.colour % modulus) % modulus), q);
    }
    ChamberWord { syllables: word }
}

/// Sum of the colours of all `g`-syllables, modulo `q_g`.
pub fn syllable_sum(a: &ChamberWord, g: Gen, q: &Thickness) -> u32 {
    let modulus = q.q(g);
    a.syllables
        .iter()
        .filter(|s| s.gen == g)
        .fold(0, |acc, s| (acc + s.colour) % modulus)
}
