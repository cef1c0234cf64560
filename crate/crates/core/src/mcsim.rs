//! Monte Carlo Pauli-frame simulation of the encoded chain.
//!
//! Errors are injected at the level of the effective output probabilities:
//! every physical output of a Z-measured block flips with probability `q_b`
//! and every output of an X-measured block with probability `q_p`. Blocks
//! are decoded with the code's own decoder and a block counts as a logical
//! error when the decoded value is wrong, when the decoder gives up, or when
//! more than `t` outputs were flipped (a lucky decode beyond the distance is
//! still counted, which keeps the per-block rate equal to the binomial tail).
//!
//! Per trial the blocks are drawn in a fixed order:
//!
//! 0. final recovery, X basis
//! 1. final recovery, Z basis
//! 2. and 3. key measurement at the two end stations, X basis
//! 4. and 5. key measurement at the two end stations, Z basis
//! 6. onwards: each intermediate station contributes an X block then a Z block
//!
//! Each block consumes one 32-bit draw for its logical value plus one per
//! qubit, from a ChaCha8 stream selected by the trial index. Results do not
//! depend on scheduling, and runs that differ only in `q` or `L` share their
//! random numbers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::codes::{Basis, BlockDecode, CssCode, Protection, Word};
use crate::error::{check_prob, domain, Error, Result};

/// Trials per parallel work unit.
const CHUNK: u64 = 1 << 12;

/// Largest number of error bits [`exact_chain_error`] will enumerate.
pub const EXACT_BIT_LIMIT: usize = 30;

#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub code: CssCode,
    pub stations: usize,
    pub q_b: f64,
    pub q_p: f64,
    pub trials: u64,
    pub master_seed: u64,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stations < 3 {
            return Err(domain(format!(
                "need at least 3 stations, got {}",
                self.stations
            )));
        }
        if self.trials == 0 {
            return Err(domain("trials must be positive"));
        }
        check_prob("q_b", self.q_b)?;
        check_prob("q_p", self.q_p)?;
        if !self.code.has_decoder() {
            return Err(Error::UnsupportedDecoder(self.code.name().to_string()));
        }
        Ok(())
    }

    /// Repetition codes only protect against bit flips, so every block is
    /// treated as a Z-basis block with rate `q_b` and `q_p` is ignored.
    pub fn single_species(&self) -> bool {
        self.code.protection() == Protection::BitFlipOnly
    }

    fn blocks(&self) -> Vec<Block> {
        let single = self.single_species();
        let x = if single { Block::Z } else { Block::X };
        let mut out = vec![x, Block::Z, x, x, Block::Z, Block::Z];
        for _ in 1..self.stations - 1 {
            out.push(x);
            out.push(Block::Z);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    X,
    Z,
}

const RECOVERY: [usize; 2] = [0, 1];
const KEY_X: [usize; 2] = [2, 3];
const KEY_Z: [usize; 2] = [4, 5];
const FIRST_STATION: usize = 6;

/// Empirical fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub count: u64,
    pub fraction: f64,
    pub std_err: f64,
}

impl Estimate {
    fn new(count: u64, trials: u64) -> Self {
        let p = count as f64 / trials as f64;
        Self {
            count,
            fraction: p,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// `(fraction - expected) / se` with the binomial standard error of
    /// `expected` over `trials`, falling back to the empirical one when
    /// `expected` is 0 or 1.
    pub fn z_score(&self, expected: f64, trials: u64) -> f64 {
        let diff = self.fraction - expected;
        if diff == 0.0 {
            return 0.0;
        }
        let null_se = (expected * (1.0 - expected) / trials as f64).sqrt();
        let se = if null_se > 0.0 { null_se } else { self.std_err };
        if se == 0.0 {
            f64::INFINITY.copysign(diff)
        } else {
            diff / se
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub trials: u64,
    /// No logical error anywhere in the chain.
    pub error_free: Estimate,
    /// No error in the intermediate X blocks or either X key measurement.
    pub x_chain_correct: Estimate,
    pub z_chain_correct: Estimate,
    /// The X (Z) key bits agree: an even number of relevant logical errors.
    pub x_key_agree: Estimate,
    pub z_key_agree: Estimate,
    /// Logical error counts `[x, z]` for intermediate stations `1..L-1`.
    pub station_errors: Vec<[u64; 2]>,
    /// Logical error counts `[x, z]` in the final recovery.
    pub recovery_errors: [u64; 2],
    /// Blocks decoded to the right value despite more than `t` flips.
    pub lucky_decodes: u64,
    /// Blocks where the decoder reported a syndrome beyond its distance.
    pub decoder_failures: u64,
}

impl SimOutcome {
    /// Empirical per-block logical error rate over intermediate blocks of one basis.
    pub fn station_error_rate(&self, basis: Basis) -> Estimate {
        let i = match basis {
            Basis::X => 0,
            Basis::Z => 1,
        };
        let count = self.station_errors.iter().map(|c| c[i]).sum();
        Estimate::new(count, self.trials * self.station_errors.len() as u64)
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    error_free: u64,
    x_correct: u64,
    z_correct: u64,
    x_agree: u64,
    z_agree: u64,
    blocks: Vec<u64>,
    lucky: u64,
    failures: u64,
}

impl Tally {
    fn with_blocks(n: usize) -> Self {
        Self {
            blocks: vec![0; n],
            ..Self::default()
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.error_free += other.error_free;
        self.x_correct += other.x_correct;
        self.z_correct += other.z_correct;
        self.x_agree += other.x_agree;
        self.z_agree += other.z_agree;
        self.lucky += other.lucky;
        self.failures += other.failures;
        for (a, b) in self.blocks.iter_mut().zip(other.blocks) {
            *a += b;
        }
        self
    }
}

/// Bernoulli threshold on a uniform 32-bit draw.
fn threshold(q: f64) -> u64 {
    (q * 4_294_967_296.0).round() as u64
}

struct BlockResult {
    error: bool,
    lucky: bool,
    failure: bool,
}

/// Shared judgement of one decoded block.
fn judge(code: &CssCode, basis: Basis, bit: bool, flips: Word) -> Result<BlockResult> {
    let word = code.encode_logical(basis, bit) ^ flips;
    let decoded = code.decode_word(basis, word)?;
    let heavy = flips.count_ones() as usize > code.t();
    Ok(match decoded {
        BlockDecode::BeyondDistance => BlockResult {
            error: true,
            lucky: false,
            failure: true,
        },
        d => {
            let wrong = d.logical_bit() != Some(bit);
            BlockResult {
                error: wrong || heavy,
                lucky: heavy && !wrong,
                failure: false,
            }
        }
    })
}

fn block_basis(b: Block) -> Basis {
    match b {
        Block::X => Basis::X,
        Block::Z => Basis::Z,
    }
}

fn run_trial(
    cfg: &ChainConfig,
    blocks: &[Block],
    base: &ChaCha8Rng,
    trial: u64,
    tally: &mut Tally,
) -> Result<()> {
    let mut rng = base.clone();
    rng.set_stream(trial);
    let n = cfg.code.n();
    let (tb, tp) = (threshold(cfg.q_b), threshold(cfg.q_p));
    let mut errors = Vec::with_capacity(blocks.len());
    for &block in blocks {
        let bit = rng.next_u32() & 1 == 1;
        let th = if block == Block::X { tp } else { tb };
        let mut flips: Word = 0;
        for i in 0..n {
            if (rng.next_u32() as u64) < th {
                flips |= 1 << i;
            }
        }
        let r = judge(&cfg.code, block_basis(block), bit, flips)?;
        tally.lucky += r.lucky as u64;
        tally.failures += r.failure as u64;
        errors.push(r.error);
    }
    for (count, &e) in tally.blocks.iter_mut().zip(&errors) {
        *count += e as u64;
    }

    let stations = &errors[FIRST_STATION..];
    let xs = stations.iter().step_by(2).copied();
    let zs = stations.iter().skip(1).step_by(2).copied();
    let x_relevant: Vec<bool> = xs.chain(KEY_X.iter().map(|&i| errors[i])).collect();
    let z_relevant: Vec<bool> = zs.chain(KEY_Z.iter().map(|&i| errors[i])).collect();

    let clean = !RECOVERY.iter().any(|&i| errors[i]) && !stations.iter().any(|&e| e);
    tally.error_free += clean as u64;
    tally.x_correct += !x_relevant.iter().any(|&e| e) as u64;
    tally.z_correct += !z_relevant.iter().any(|&e| e) as u64;
    tally.x_agree += (x_relevant.iter().filter(|&&e| e).count() % 2 == 0) as u64;
    tally.z_agree += (z_relevant.iter().filter(|&&e| e).count() % 2 == 0) as u64;
    Ok(())
}

/// Runs `cfg.trials` independent chains on the current rayon pool.
pub fn simulate_chain(cfg: &ChainConfig) -> Result<SimOutcome> {
    cfg.validate()?;
    let blocks = cfg.blocks();
    let base = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    let chunks = cfg.trials.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::with_blocks(blocks.len());
            for trial in c * CHUNK..((c + 1) * CHUNK).min(cfg.trials) {
                run_trial(cfg, &blocks, &base, trial, &mut tally)?;
            }
            Ok(tally)
        })
        .try_reduce(|| Tally::with_blocks(blocks.len()), |a, b| Ok(a.merge(b)))?;

    let trials = cfg.trials;
    let station_errors = tally.blocks[FIRST_STATION..]
        .chunks(2)
        .map(|c| [c[0], c[1]])
        .collect();
    Ok(SimOutcome {
        trials,
        error_free: Estimate::new(tally.error_free, trials),
        x_chain_correct: Estimate::new(tally.x_correct, trials),
        z_chain_correct: Estimate::new(tally.z_correct, trials),
        x_key_agree: Estimate::new(tally.x_agree, trials),
        z_key_agree: Estimate::new(tally.z_agree, trials),
        station_errors,
        recovery_errors: [tally.blocks[RECOVERY[0]], tally.blocks[RECOVERY[1]]],
        lucky_decodes: tally.lucky,
        decoder_failures: tally.failures,
    })
}

/// Exact probability that a chain has no logical error, by enumerating
/// every error pattern on the recovery and intermediate blocks.
///
/// Limited to `n <= 5`, `L <= 4` and at most [`EXACT_BIT_LIMIT`] error bits.
pub fn exact_chain_error(code: &CssCode, stations: usize, q_b: f64, q_p: f64) -> Result<f64> {
    let cfg = ChainConfig {
        code: code.clone(),
        stations,
        q_b,
        q_p,
        trials: 1,
        master_seed: 0,
    };
    cfg.validate()?;
    let n = code.n();
    let counted = 2 * stations - 2;
    let bits = n * counted;
    if n > 5 || stations > 4 || bits > EXACT_BIT_LIMIT {
        return Err(Error::TooLarge {
            bits,
            limit: EXACT_BIT_LIMIT,
        });
    }

    // Per basis: probability weight of each flip pattern, and whether it is
    // decoded correctly (averaged over the encoded bit).
    let table = |basis: Basis, q: f64| -> Result<Vec<(f64, f64)>> {
        (0..1u128 << n)
            .map(|flips| {
                let w = flips.count_ones() as i32;
                let p = q.powi(w) * (1.0 - q).powi(n as i32 - w);
                let mut ok = 0.0;
                for bit in [false, true] {
                    if !judge(code, basis, bit, flips)?.error {
                        ok += 0.5;
                    }
                }
                Ok((p, ok))
            })
            .collect()
    };
    let blocks = cfg.blocks();
    let tables: Vec<Vec<(f64, f64)>> = blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| RECOVERY.contains(i) || *i >= FIRST_STATION)
        .map(|(_, &b)| match b {
            Block::X => table(Basis::X, q_p),
            Block::Z => table(Basis::Z, q_b),
        })
        .collect::<Result<_>>()?;

    fn walk(tables: &[Vec<(f64, f64)>], weight: f64) -> f64 {
        match tables.split_first() {
            None => weight,
            Some((first, rest)) => first
                .iter()
                .filter(|(p, ok)| *p > 0.0 && *ok > 0.0)
                .map(|&(p, ok)| walk(rest, weight * p * ok))
                .sum(),
        }
    }
    Ok(walk(&tables, 1.0))
}
