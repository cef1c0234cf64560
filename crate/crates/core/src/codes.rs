//! CSS code registry and classical decoding of transversal measurement outputs.
//!
//! An encoded Bell measurement ends with every physical qubit of one block
//! measured in the X basis and every qubit of the other block measured in the
//! Z basis. The X outputs are a noisy word of the classical code `C^X`
//! (checked by the X-type stabilizers `h_x`), the Z outputs a noisy word of
//! `C^Z` (checked by `h_z`). Decoding is purely classical: compute the
//! syndrome, apply a correction of weight at most `t`, and read the logical
//! operator's parity off the corrected word.
//!
//! Words are stored as `u128` bit masks with qubit `i` at bit `i`, so every
//! registered code (n <= 127) fits in one word.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// Bit mask over the qubits of one block; qubit `i` is bit `i`.
pub type Word = u128;

/// Names accepted by [`build_code`], in display order.
pub const CODE_NAMES: [&str; 8] = [
    "none",
    "repetition-3",
    "repetition-5",
    "hamming-7",
    "bacon-shor-25",
    "golay-23",
    "bch-127",
    "qr-103",
];

/// Measurement basis of a block. X outputs map `|+>` to 0 and `|->` to 1,
/// Z outputs map `|0>` to 0 and `|1>` to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    fn index(self) -> usize {
        match self {
            Basis::X => 0,
            Basis::Z => 1,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::X => f.write_str("X"),
            Basis::Z => f.write_str("Z"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    /// Majority vote over the block (repetition codes, and the trivial n = 1 block).
    Majority,
    /// Syndrome to coset-leader table over all patterns of weight <= t.
    LookupTable,
    /// Bacon-Shor: majority over row parities (X) or column parities (Z).
    RowColumnMajority,
    /// Registered for the analytic model only.
    Unsupported,
}

/// Which error species a code protects against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protection {
    BitAndPhase,
    /// Repetition codes: only bit flips (Z-basis outputs) are corrected.
    BitFlipOnly,
}

/// Result of decoding one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockDecode {
    /// `logical` holds the k logical bits (bit `i` for logical qubit `i`);
    /// `weight` is the Hamming weight of the applied correction.
    Corrected { logical: u64, weight: u32 },
    /// The syndrome has no correction of weight <= t.
    BeyondDistance,
}

impl BlockDecode {
    /// First logical bit, or `None` on a decoder failure.
    pub fn logical_bit(self) -> Option<bool> {
        match self {
            BlockDecode::Corrected { logical, .. } => Some(logical & 1 == 1),
            BlockDecode::BeyondDistance => None,
        }
    }
}

#[derive(Debug)]
struct SyndromeTable {
    leaders: Vec<Option<Word>>,
}

/// A CSS code with its parity checks, logical operators and decoder.
#[derive(Debug, Clone)]
pub struct CssCode {
    name: &'static str,
    n: usize,
    k: usize,
    t: usize,
    h_x: Vec<Word>,
    h_z: Vec<Word>,
    logical_x: Vec<Word>,
    logical_z: Vec<Word>,
    decoder: DecoderKind,
    protection: Protection,
    tables: [Option<Arc<SyndromeTable>>; 2],
}

#[inline]
fn parity(w: Word) -> bool {
    w.count_ones() & 1 == 1
}

fn syndrome(checks: &[Word], word: Word) -> usize {
    checks.iter().enumerate().fold(0usize, |s, (j, &row)| {
        s | ((parity(row & word) as usize) << j)
    })
}

fn full_mask(n: usize) -> Word {
    if n >= 128 {
        Word::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Calls `f` for every n-bit word of Hamming weight `w` (Gosper's hack).
pub(crate) fn for_each_weight(n: usize, w: usize, mut f: impl FnMut(Word)) {
    if w > n {
        return;
    }
    if w == 0 {
        f(0);
        return;
    }
    let limit = full_mask(n);
    let mut x: Word = (1u128 << w) - 1;
    loop {
        f(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        if r == 0 || r > limit {
            break;
        }
        x = (((r ^ x) >> 2) / c) | r;
        if x > limit {
            break;
        }
    }
}

impl CssCode {
    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Physical qubits per block.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Logical qubits per block.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Correctable errors per block.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn distance(&self) -> usize {
        2 * self.t + 1
    }

    pub fn h_x(&self) -> &[Word] {
        &self.h_x
    }

    pub fn h_z(&self) -> &[Word] {
        &self.h_z
    }

    pub fn logical_x(&self) -> &[Word] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[Word] {
        &self.logical_z
    }

    pub fn decoder_kind(&self) -> DecoderKind {
        self.decoder
    }

    pub fn protection(&self) -> Protection {
        self.protection
    }

    /// True for codes that suppress only one error species.
    pub fn single_error_type(&self) -> bool {
        self.protection == Protection::BitFlipOnly
    }

    pub fn has_decoder(&self) -> bool {
        self.decoder != DecoderKind::Unsupported
    }

    fn checks(&self, basis: Basis) -> &[Word] {
        match basis {
            Basis::X => &self.h_x,
            Basis::Z => &self.h_z,
        }
    }

    fn logicals(&self, basis: Basis) -> &[Word] {
        match basis {
            Basis::X => &self.logical_x,
            Basis::Z => &self.logical_z,
        }
    }

    /// A noiseless measurement output of logical value `bit` in `basis`.
    ///
    /// The X outputs of the logical `|->` state carry the support of the
    /// logical Z operator, and vice versa.
    pub fn encode_logical(&self, basis: Basis, bit: bool) -> Word {
        if !bit {
            return 0;
        }
        let conj = match basis {
            Basis::X => &self.logical_z,
            Basis::Z => &self.logical_x,
        };
        conj.first().copied().unwrap_or(0)
    }

    /// Syndrome of `word` against the checks of `basis`.
    pub fn syndrome(&self, basis: Basis, word: Word) -> usize {
        syndrome(self.checks(basis), word)
    }

    /// Decodes a block of measurement outputs given as 0/1 values.
    pub fn decode_block(&self, basis: Basis, outputs: &[u8]) -> Result<BlockDecode> {
        if outputs.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: outputs.len(),
            });
        }
        let mut word: Word = 0;
        for (i, &b) in outputs.iter().enumerate() {
            match b {
                0 => {}
                1 => word |= 1 << i,
                other => {
                    return Err(domain(format!(
                        "output bit {i} is {other}, expected 0 or 1"
                    )))
                }
            }
        }
        self.decode_word(basis, word)
    }

    /// Decodes a block of measurement outputs packed into a word.
    pub fn decode_word(&self, basis: Basis, word: Word) -> Result<BlockDecode> {
        let correction = match self.decoder {
            DecoderKind::Unsupported => {
                return Err(Error::UnsupportedDecoder(self.name.to_string()))
            }
            DecoderKind::Majority => self.majority_correction(basis, word),
            DecoderKind::LookupTable => {
                let table = self.tables[basis.index()]
                    .as_ref()
                    .expect("lookup tables are built at construction");
                match table.leaders[self.syndrome(basis, word)] {
                    Some(leader) => leader,
                    None => return Ok(BlockDecode::BeyondDistance),
                }
            }
            DecoderKind::RowColumnMajority => self.row_column_correction(basis, word),
        };
        let corrected = word ^ correction;
        let logical = self
            .logicals(basis)
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &op)| {
                acc | ((parity(op & corrected) as u64) << i)
            });
        Ok(BlockDecode::Corrected {
            logical,
            weight: correction.count_ones(),
        })
    }

    fn majority_correction(&self, basis: Basis, word: Word) -> Word {
        // No checks in this basis: nothing to correct, the logical value is a bare parity.
        if self.checks(basis).is_empty() {
            return 0;
        }
        let ones = word.count_ones() as usize;
        if 2 * ones > self.n {
            !word & full_mask(self.n)
        } else {
            word
        }
    }

    fn row_column_correction(&self, basis: Basis, word: Word) -> Word {
        let side = self.side();
        let line = |i: usize| -> Word {
            let mut m = 0;
            for j in 0..side {
                m |= match basis {
                    Basis::X => 1u128 << (i * side + j),
                    Basis::Z => 1u128 << (j * side + i),
                };
            }
            m
        };
        let parities: Vec<bool> = (0..side).map(|i| parity(word & line(i))).collect();
        let odd = parities.iter().filter(|&&p| p).count();
        let majority = 2 * odd > side;
        // Flip the first qubit of every minority line.
        parities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != majority)
            .fold(0, |acc, (i, _)| {
                acc | match basis {
                    Basis::X => 1u128 << (i * side),
                    Basis::Z => 1u128 << i,
                }
            })
    }

    fn side(&self) -> usize {
        (self.n as f64).sqrt().round() as usize
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: String| Error::InvalidCode {
            name: self.name.to_string(),
            what,
        };
        let mask = full_mask(self.n);
        let all = self
            .h_x
            .iter()
            .chain(&self.h_z)
            .chain(&self.logical_x)
            .chain(&self.logical_z);
        if all.clone().any(|&w| w & !mask != 0) {
            return Err(bad("a row has support outside the block".into()));
        }
        for (i, &gx) in self.h_x.iter().enumerate() {
            for (j, &gz) in self.h_z.iter().enumerate() {
                if parity(gx & gz) {
                    return Err(bad(format!("X check {i} anticommutes with Z check {j}")));
                }
            }
            for (j, &lz) in self.logical_z.iter().enumerate() {
                if parity(gx & lz) {
                    return Err(bad(format!("logical Z {j} anticommutes with X check {i}")));
                }
            }
        }
        for (i, &gz) in self.h_z.iter().enumerate() {
            for (j, &lx) in self.logical_x.iter().enumerate() {
                if parity(gz & lx) {
                    return Err(bad(format!("logical X {j} anticommutes with Z check {i}")));
                }
            }
        }
        if self.has_decoder() {
            if self.logical_x.len() != self.k || self.logical_z.len() != self.k {
                return Err(bad("logical operator count differs from k".into()));
            }
            for (i, &lx) in self.logical_x.iter().enumerate() {
                for (j, &lz) in self.logical_z.iter().enumerate() {
                    if parity(lx & lz) != (i == j) {
                        return Err(bad(format!(
                            "logical X {i} and Z {j} have wrong commutation"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds the coset-leader tables, failing if two patterns of weight <= t
    /// share a syndrome in either basis.
    fn with_tables(mut self) -> Result<Self> {
        for basis in [Basis::X, Basis::Z] {
            let checks = self.checks(basis);
            let mut leaders = vec![None; 1usize << checks.len()];
            let mut clash = None;
            for w in 0..=self.t {
                for_each_weight(self.n, w, |e| {
                    let s = syndrome(checks, e);
                    match leaders[s] {
                        None => leaders[s] = Some(e),
                        Some(prev) if clash.is_none() => clash = Some((prev, e)),
                        Some(_) => {}
                    }
                });
            }
            if let Some((a, b)) = clash {
                return Err(Error::InvalidCode {
                    name: self.name.to_string(),
                    what: format!("{basis} patterns {a:#x} and {b:#x} share a syndrome"),
                });
            }
            self.tables[basis.index()] = Some(Arc::new(SyndromeTable { leaders }));
        }
        Ok(self)
    }
}

fn repetition(name: &'static str, n: usize) -> CssCode {
    let h_z = (0..n - 1).map(|i| 0b11u128 << i).collect();
    CssCode {
        name,
        n,
        k: 1,
        t: (n - 1) / 2,
        h_x: Vec::new(),
        h_z,
        logical_x: vec![full_mask(n)],
        logical_z: vec![full_mask(n)],
        decoder: DecoderKind::Majority,
        protection: Protection::BitFlipOnly,
        tables: [None, None],
    }
}

fn unencoded() -> CssCode {
    CssCode {
        name: "none",
        n: 1,
        k: 1,
        t: 0,
        h_x: Vec::new(),
        h_z: Vec::new(),
        logical_x: vec![1],
        logical_z: vec![1],
        decoder: DecoderKind::Majority,
        protection: Protection::BitAndPhase,
        tables: [None, None],
    }
}

/// Steane code: both checks are the [7,4] Hamming parity-check matrix.
fn hamming7() -> CssCode {
    let rows: Vec<Word> = (0..3)
        .map(|r| {
            (0..7)
                .filter(|j| ((j + 1) >> r) & 1 == 1)
                .fold(0, |m, j| m | 1 << j)
        })
        .collect();
    CssCode {
        name: "hamming-7",
        n: 7,
        k: 1,
        t: 1,
        h_x: rows.clone(),
        h_z: rows,
        logical_x: vec![full_mask(7)],
        logical_z: vec![full_mask(7)],
        decoder: DecoderKind::LookupTable,
        protection: Protection::BitAndPhase,
        tables: [None, None],
    }
}

/// Generator polynomial x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1 of the binary Golay code.
const GOLAY_GENERATOR: u32 = 0xC75;

/// Quantum Golay code. Column `j` of the check matrix is `x^j mod g(x)`, so the
/// kernel is the cyclic [23,12,7] code and the row space is its even-weight dual.
fn golay23() -> CssCode {
    let columns: Vec<u32> = (0..23)
        .scan(1u32, |r, _| {
            let out = *r;
            *r <<= 1;
            if *r & (1 << 11) != 0 {
                *r ^= GOLAY_GENERATOR;
            }
            Some(out)
        })
        .collect();
    let rows: Vec<Word> = (0..11)
        .map(|i| {
            columns
                .iter()
                .enumerate()
                .filter(|(_, &c)| (c >> i) & 1 == 1)
                .fold(0, |m, (j, _)| m | 1u128 << j)
        })
        .collect();
    CssCode {
        name: "golay-23",
        n: 23,
        k: 1,
        t: 3,
        h_x: rows.clone(),
        h_z: rows,
        logical_x: vec![full_mask(23)],
        logical_z: vec![full_mask(23)],
        decoder: DecoderKind::LookupTable,
        protection: Protection::BitAndPhase,
        tables: [None, None],
    }
}

/// Bacon-Shor code on a `side x side` grid, qubit (r, c) at index `r * side + c`.
/// X checks are adjacent row pairs, Z checks adjacent column pairs.
fn bacon_shor(name: &'static str, side: usize) -> CssCode {
    let row = |r: usize| (0..side).fold(0u128, |m, c| m | 1 << (r * side + c));
    let col = |c: usize| (0..side).fold(0u128, |m, r| m | 1 << (r * side + c));
    CssCode {
        name,
        n: side * side,
        k: 1,
        t: (side - 1) / 2,
        h_x: (0..side - 1).map(|r| row(r) | row(r + 1)).collect(),
        h_z: (0..side - 1).map(|c| col(c) | col(c + 1)).collect(),
        logical_x: vec![row(0)],
        logical_z: vec![col(0)],
        decoder: DecoderKind::RowColumnMajority,
        protection: Protection::BitAndPhase,
        tables: [None, None],
    }
}

fn analytic_only(name: &'static str, n: usize, k: usize, t: usize) -> CssCode {
    CssCode {
        name,
        n,
        k,
        t,
        h_x: Vec::new(),
        h_z: Vec::new(),
        logical_x: Vec::new(),
        logical_z: Vec::new(),
        decoder: DecoderKind::Unsupported,
        protection: Protection::BitAndPhase,
        tables: [None, None],
    }
}

/// Looks up a code by its registry name.
pub fn build_code(name: &str) -> Result<CssCode> {
    let code = match name {
        "none" => unencoded(),
        "repetition-3" => repetition("repetition-3", 3),
        "repetition-5" => repetition("repetition-5", 5),
        "hamming-7" => hamming7().with_tables()?,
        "bacon-shor-25" => bacon_shor("bacon-shor-25", 5),
        "golay-23" => golay23().with_tables()?,
        "bch-127" => analytic_only("bch-127", 127, 29, 7),
        "qr-103" => analytic_only("qr-103", 103, 1, 9),
        _ => {
            return Err(Error::UnknownCode {
                name: name.to_string(),
                valid: CODE_NAMES.join(", "),
            })
        }
    };
    code.validate()?;
    Ok(code)
}

/// All registered codes, in display order.
pub fn all_codes() -> Vec<CssCode> {
    CODE_NAMES
        .iter()
        .map(|n| build_code(n).expect("registry entries are valid"))
        .collect()
}

/// Signs of the stabilizer generators of one block, `true` meaning -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StabilizerFrame {
    pub x_eigen: Vec<bool>,
    pub z_eigen: Vec<bool>,
}

impl StabilizerFrame {
    /// All generators at +1.
    pub fn trivial(code: &CssCode) -> Self {
        Self {
            x_eigen: vec![false; code.h_x().len()],
            z_eigen: vec![false; code.h_z().len()],
        }
    }

    /// Checks the frame's lengths against `code`.
    pub fn check_for(&self, code: &CssCode) -> Result<()> {
        dims(code.h_x().len(), self.x_eigen.len())?;
        dims(code.h_z().len(), self.z_eigen.len())
    }
}

fn dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

/// Eigenvalue bookkeeping for a transversal CNOT between two blocks: the
/// control keeps its X signs and picks up the product of Z signs, the target
/// keeps its Z signs and picks up the product of X signs.
pub fn stabilizer_cnot_update(
    control: &StabilizerFrame,
    target: &StabilizerFrame,
) -> Result<(StabilizerFrame, StabilizerFrame)> {
    dims(control.x_eigen.len(), target.x_eigen.len())?;
    dims(control.z_eigen.len(), target.z_eigen.len())?;
    let xor = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(x, y)| x ^ y).collect::<Vec<_>>();
    let new_control = StabilizerFrame {
        x_eigen: control.x_eigen.clone(),
        z_eigen: xor(&control.z_eigen, &target.z_eigen),
    };
    let new_target = StabilizerFrame {
        x_eigen: xor(&control.x_eigen, &target.x_eigen),
        z_eigen: target.z_eigen.clone(),
    };
    Ok((new_control, new_target))
}

/// Qubits needed per repeater station.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceEstimate {
    pub total: usize,
    pub memory: usize,
    pub ancilla: usize,
}

/// `2n` memory qubits plus `2n` distillation and `n_GHZ = 2n` GHZ ancillas.
/// An unencoded station needs two connection qubits and two purification qubits.
pub fn resource_estimate(code: &CssCode) -> ResourceEstimate {
    if code.name() == "none" {
        return ResourceEstimate {
            total: 4,
            memory: 2,
            ancilla: 2,
        };
    }
    let n = code.n();
    ResourceEstimate {
        total: 6 * n,
        memory: 2 * n,
        ancilla: 4 * n,
    }
}
