//! Outer block codes: construction, exact weight enumerators and encoding.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest message length accepted by the exhaustive enumerators.
pub const MAX_BRUTE_FORCE_K: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeKind {
    Hamming,
    ExtendedHamming,
    Repetition,
    Custom,
}

impl CodeKind {
    fn name(self) -> &'static str {
        match self {
            CodeKind::Hamming => "hamming",
            CodeKind::ExtendedHamming => "extended-hamming",
            CodeKind::Repetition => "repetition",
            CodeKind::Custom => "custom",
        }
    }
}

/// Binary matrix stored as rows of 0/1 bytes.
pub type BitMatrix = Vec<Vec<u8>>;

/// A binary linear `(n, k)` block code with a systematic generator.
///
/// The generator is in reduced row-echelon form; `info_positions[i]` is the
/// pivot column of row `i`, so message bit `i` appears verbatim at that
/// codeword position. For the built-in families the pivots are `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCodeSpec {
    pub kind: CodeKind,
    pub n: usize,
    pub k: usize,
    /// Hamming order, for the Hamming families only.
    pub m: Option<u32>,
    pub generator: BitMatrix,
    pub parity_check: BitMatrix,
    pub info_positions: Vec<usize>,
}

/// Parameters for [`build_code`].
#[derive(Debug, Clone)]
pub enum CodeParams {
    Hamming { m: u32 },
    ExtendedHamming { m: u32 },
    Repetition { n: usize },
    Custom { generator: BitMatrix },
}

fn check_hamming_order(m: u32) -> Result<()> {
    if !(2..=8).contains(&m) {
        return Err(Error::out_of_range("Hamming order m", m, "[2, 8]"));
    }
    Ok(())
}

/// Builds an outer code. Hamming columns are ordered so that the generator is
/// `[I_k | P]`; the extended code appends an overall even-parity bit.
pub fn build_code(params: &CodeParams) -> Result<BlockCodeSpec> {
    match *params {
        CodeParams::Hamming { m } => {
            check_hamming_order(m)?;
            Ok(hamming(m))
        }
        CodeParams::ExtendedHamming { m } => {
            check_hamming_order(m)?;
            Ok(extend_with_parity(hamming(m)))
        }
        CodeParams::Repetition { n } => {
            if n < 2 {
                return Err(Error::out_of_range("repetition length n", n, "n >= 2"));
            }
            Ok(repetition(n))
        }
        CodeParams::Custom { ref generator } => custom(generator),
    }
}

fn hamming(m: u32) -> BlockCodeSpec {
    let n = (1usize << m) - 1;
    let r = m as usize;
    let k = n - r;
    // Non-unit patterns first (message columns), then the unit patterns.
    let mut columns: Vec<usize> = (1..=n).filter(|c| !c.is_power_of_two()).collect();
    columns.extend((0..r).map(|b| 1usize << b));

    let parity_check: BitMatrix = (0..r)
        .map(|row| columns.iter().map(|&c| ((c >> row) & 1) as u8).collect())
        .collect();
    let generator: BitMatrix = (0..k)
        .map(|i| {
            let mut g = vec![0u8; n];
            g[i] = 1;
            for (row, bit) in g[k..].iter_mut().enumerate() {
                *bit = ((columns[i] >> row) & 1) as u8;
            }
            g
        })
        .collect();
    BlockCodeSpec {
        kind: CodeKind::Hamming,
        n,
        k,
        m: Some(m),
        generator,
        parity_check,
        info_positions: (0..k).collect(),
    }
}

fn extend_with_parity(base: BlockCodeSpec) -> BlockCodeSpec {
    let n = base.n + 1;
    let generator = base
        .generator
        .iter()
        .map(|row| {
            let mut g = row.clone();
            g.push(row.iter().fold(0, |acc, &b| acc ^ b));
            g
        })
        .collect();
    let mut parity_check: BitMatrix = base
        .parity_check
        .iter()
        .map(|row| {
            let mut h = row.clone();
            h.push(0);
            h
        })
        .collect();
    parity_check.push(vec![1; n]);
    BlockCodeSpec {
        kind: CodeKind::ExtendedHamming,
        n,
        k: base.k,
        m: base.m,
        generator,
        parity_check,
        info_positions: base.info_positions,
    }
}

fn repetition(n: usize) -> BlockCodeSpec {
    let parity_check = (1..n)
        .map(|j| {
            let mut h = vec![0u8; n];
            h[0] = 1;
            h[j] = 1;
            h
        })
        .collect();
    BlockCodeSpec {
        kind: CodeKind::Repetition,
        n,
        k: 1,
        m: None,
        generator: vec![vec![1; n]],
        parity_check,
        info_positions: vec![0],
    }
}

fn custom(rows: &BitMatrix) -> Result<BlockCodeSpec> {
    let k = rows.len();
    if k == 0 {
        return Err(Error::InvalidParameter("empty generator matrix".into()));
    }
    let n = rows[0].len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter(
            "generator rows must be nonempty and of equal length".into(),
        ));
    }
    if rows.iter().flatten().any(|&b| b > 1) {
        return Err(Error::InvalidParameter(
            "generator entries must be 0 or 1".into(),
        ));
    }
    let mut g = rows.clone();
    let mut pivots = Vec::with_capacity(k);
    let mut rank = 0;
    for col in 0..n {
        if rank == k {
            break;
        }
        let Some(p) = (rank..k).find(|&r| g[r][col] == 1) else {
            continue;
        };
        g.swap(rank, p);
        for r in 0..k {
            if r != rank && g[r][col] == 1 {
                let pivot_row = g[rank].clone();
                g[r].iter_mut().zip(&pivot_row).for_each(|(a, &b)| *a ^= b);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < k {
        return Err(Error::RankDeficient { rank, k });
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let parity_check = free
        .iter()
        .map(|&j| {
            let mut h = vec![0u8; n];
            h[j] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                h[p] = g[i][j];
            }
            h
        })
        .collect();
    Ok(BlockCodeSpec {
        kind: CodeKind::Custom,
        n,
        k,
        m: None,
        generator: g,
        parity_check,
        info_positions: pivots,
    })
}

impl BlockCodeSpec {
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Short label such as `(31,26)`.
    pub fn label(&self) -> String {
        format!("({},{})", self.n, self.k)
    }

    /// `message · G` over GF(2).
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: message.len(),
            });
        }
        let mut out = vec![0u8; self.n];
        self.encode_into(message, &mut out);
        Ok(out)
    }

    /// Unchecked encoder used on the simulation hot path.
    pub(crate) fn encode_into(&self, message: &[u8], out: &mut [u8]) {
        out.iter_mut().for_each(|b| *b = 0);
        for (row, _) in self
            .generator
            .iter()
            .zip(message)
            .filter(|(_, &m)| m & 1 == 1)
        {
            out.iter_mut().zip(row).for_each(|(o, &g)| *o ^= g);
        }
    }

    /// `H · c^T == 0`.
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n
            && self
                .parity_check
                .iter()
                .all(|h| h.iter().zip(word).fold(0u8, |acc, (&a, &b)| acc ^ (a & b)) == 0)
    }

    fn packed_rows(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        self.generator
            .iter()
            .map(|row| {
                let mut packed = vec![0u64; words];
                for (j, _) in row.iter().enumerate().filter(|(_, &b)| b == 1) {
                    packed[j / 64] |= 1 << (j % 64);
                }
                packed
            })
            .collect()
    }

    /// Visits the weight of every codeword in Gray-code order.
    fn for_each_codeword_weight(&self, mut f: impl FnMut(usize)) -> Result<()> {
        if self.k > MAX_BRUTE_FORCE_K {
            return Err(Error::TooLargeForEnumeration {
                k: self.k,
                max: MAX_BRUTE_FORCE_K,
            });
        }
        let rows = self.packed_rows();
        let mut word = vec![0u64; self.n.div_ceil(64)];
        f(0);
        for step in 1u64..(1u64 << self.k) {
            let flip = step.trailing_zeros() as usize;
            word.iter_mut().zip(&rows[flip]).for_each(|(w, r)| *w ^= r);
            f(word.iter().map(|w| w.count_ones() as usize).sum());
        }
        Ok(())
    }
}

/// Exact weight distribution `A_0..A_n` of a block code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpectrum {
    pub n: usize,
    pub counts: Vec<BigUint>,
}

impl WeightSpectrum {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Natural logs of the counts, `-∞` for zero entries.
    pub fn logs(&self) -> Vec<f64> {
        self.counts.iter().map(ln_biguint).collect()
    }

    /// Smallest nonzero weight with a nonzero count.
    pub fn min_nonzero_weight(&self) -> Option<usize> {
        (1..=self.n).find(|&i| !self.counts[i].is_zero())
    }

    /// Largest weight with a nonzero count.
    pub fn max_weight(&self) -> usize {
        (0..=self.n)
            .rev()
            .find(|&i| !self.counts[i].is_zero())
            .unwrap_or(0)
    }
}

/// `ln x` for an arbitrary-precision count.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeMethod {
    ClosedForm,
    BruteForce,
}

pub fn weight_enumerator(code: &BlockCodeSpec, method: WeMethod) -> Result<WeightSpectrum> {
    match method {
        WeMethod::ClosedForm => closed_form_we(code),
        WeMethod::BruteForce => {
            let mut counts = vec![0u64; code.n + 1];
            code.for_each_codeword_weight(|w| counts[w] += 1)?;
            Ok(WeightSpectrum {
                n: code.n,
                counts: counts.into_iter().map(BigUint::from).collect(),
            })
        }
    }
}

/// Closed form where available, brute force otherwise.
pub fn weight_enumerator_auto(code: &BlockCodeSpec) -> Result<WeightSpectrum> {
    match code.kind {
        CodeKind::Custom => weight_enumerator(code, WeMethod::BruteForce),
        _ => weight_enumerator(code, WeMethod::ClosedForm),
    }
}

fn closed_form_we(code: &BlockCodeSpec) -> Result<WeightSpectrum> {
    match code.kind {
        CodeKind::Hamming => Ok(hamming_we(code.n)),
        CodeKind::ExtendedHamming => {
            let base = hamming_we(code.n - 1);
            let mut counts = vec![BigUint::zero(); code.n + 1];
            for (i, c) in base.counts.into_iter().enumerate() {
                counts[i + (i & 1)] += c;
            }
            Ok(WeightSpectrum { n: code.n, counts })
        }
        CodeKind::Repetition => {
            let mut counts = vec![BigUint::zero(); code.n + 1];
            counts[0] = BigUint::one();
            counts[code.n] = BigUint::one();
            Ok(WeightSpectrum { n: code.n, counts })
        }
        CodeKind::Custom => Err(Error::NoClosedForm(code.kind.name())),
    }
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (i, c) in row.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c;
        }
        row = next;
    }
    row
}

/// `A(x) = [(1+x)^n + n (1+x)^{(n-1)/2} (1-x)^{(n+1)/2}] / (n+1)`.
fn hamming_we(n: usize) -> WeightSpectrum {
    let plus = binomial_row(n);
    let a = binomial_row((n - 1) / 2);
    let mut b = binomial_row(n.div_ceil(2));
    for (j, c) in b.iter_mut().enumerate() {
        if j % 2 == 1 {
            *c = -c.clone();
        }
    }
    let mut mixed = vec![BigInt::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            mixed[i + j] += x * y;
        }
    }
    let scale = BigInt::from(n);
    let denom = BigInt::from(n + 1);
    let counts = plus
        .into_iter()
        .zip(mixed)
        .map(|(p, q)| {
            let num = p + &scale * q;
            debug_assert!(!num.is_negative() && (&num % &denom).is_zero());
            (num / &denom).to_biguint().expect("nonnegative count")
        })
        .collect();
    WeightSpectrum { n, counts }
}

/// Minimum nonzero codeword weight by exhaustive enumeration.
pub fn min_distance_oracle(code: &BlockCodeSpec) -> Result<usize> {
    let mut best = usize::MAX;
    code.for_each_codeword_weight(|w| {
        if w > 0 && w < best {
            best = w;
        }
    })?;
    Ok(best)
}

/// Text token naming an outer code: `hamming:m`, `ehamming:m`, `rep:n`, `custom:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeToken {
    Hamming(u32),
    ExtendedHamming(u32),
    Repetition(usize),
    Custom(PathBuf),
}

impl FromStr for CodeToken {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse {
            what: "code token",
            input: s.to_string(),
            reason: format!(
                "{reason}; expected hamming:<m> | ehamming:<m> | rep:<n> | custom:<path>"
            ),
        };
        let (kind, arg) = s.split_once(':').ok_or_else(|| parse_err("missing ':'"))?;
        let num = |a: &str| a.parse::<usize>().map_err(|_| parse_err("bad integer"));
        match kind {
            "hamming" => Ok(CodeToken::Hamming(num(arg)? as u32)),
            "ehamming" => Ok(CodeToken::ExtendedHamming(num(arg)? as u32)),
            "rep" => Ok(CodeToken::Repetition(num(arg)?)),
            "custom" if !arg.is_empty() => Ok(CodeToken::Custom(PathBuf::from(arg))),
            _ => Err(parse_err("unknown code family")),
        }
    }
}

impl fmt::Display for CodeToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeToken::Hamming(m) => write!(f, "hamming:{m}"),
            CodeToken::ExtendedHamming(m) => write!(f, "ehamming:{m}"),
            CodeToken::Repetition(n) => write!(f, "rep:{n}"),
            CodeToken::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

impl CodeToken {
    pub fn build(&self) -> Result<BlockCodeSpec> {
        let params = match self {
            CodeToken::Hamming(m) => CodeParams::Hamming { m: *m },
            CodeToken::ExtendedHamming(m) => CodeParams::ExtendedHamming { m: *m },
            CodeToken::Repetition(n) => CodeParams::Repetition { n: *n },
            CodeToken::Custom(path) => CodeParams::Custom {
                generator: read_generator(path)?,
            },
        };
        build_code(&params)
    }
}

/// Reads a generator matrix written as lines of `0`/`1` characters.
/// Blank lines and lines starting with `#` are skipped.
pub fn read_generator(path: &Path) -> Result<BitMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_generator(&text)
}

pub fn parse_generator(text: &str) -> Result<BitMatrix> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            line.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse {
                        what: "generator row",
                        input: line.to_string(),
                        reason: format!("unexpected character {c:?}"),
                    }),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(ws: &WeightSpectrum) -> Vec<u64> {
        ws.counts.iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn hamming_7_4_structure() {
        let c = build_code(&CodeParams::Hamming { m: 3 }).unwrap();
        assert_eq!((c.n, c.k), (7, 4));
        assert_eq!(c.parity_check.len(), 3);
        let mut cols: Vec<usize> = (0..7)
            .map(|j| (0..3).map(|r| (c.parity_check[r][j] as usize) << r).sum())
            .collect();
        cols.sort_unstable();
        assert_eq!(cols, (1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn paper_sizes() {
        let h = build_code(&CodeParams::Hamming { m: 5 }).unwrap();
        assert_eq!((h.n, h.k), (31, 26));
        let e = build_code(&CodeParams::ExtendedHamming { m: 5 }).unwrap();
        assert_eq!((e.n, e.k), (32, 26));
        let e = build_code(&CodeParams::ExtendedHamming { m: 6 }).unwrap();
        assert_eq!((e.n, e.k), (64, 57));
    }

    #[test]
    fn generator_orthogonal_to_parity_check() {
        for params in [
            CodeParams::Hamming { m: 2 },
            CodeParams::Hamming { m: 6 },
            CodeParams::ExtendedHamming { m: 4 },
            CodeParams::Repetition { n: 5 },
        ] {
            let c = build_code(&params).unwrap();
            for g in &c.generator {
                assert!(c.is_codeword(g), "{params:?}");
            }
            assert_eq!(c.parity_check.len(), c.n - c.k);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_code(&CodeParams::Hamming { m: 1 }).is_err());
        assert!(build_code(&CodeParams::Hamming { m: 9 }).is_err());
        assert!(build_code(&CodeParams::Repetition { n: 1 }).is_err());
        let deficient = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert!(matches!(
            build_code(&CodeParams::Custom {
                generator: deficient
            }),
            Err(Error::RankDeficient { rank: 2, k: 3 })
        ));
    }

    #[test]
    fn seven_four_spectrum() {
        let c = build_code(&CodeParams::Hamming { m: 3 }).unwrap();
        let bf = weight_enumerator(&c, WeMethod::BruteForce).unwrap();
        assert_eq!(counts(&bf), vec![1, 0, 0, 7, 7, 0, 0, 1]);
        assert_eq!(bf, weight_enumerator(&c, WeMethod::ClosedForm).unwrap());
    }

    #[test]
    fn fifteen_eleven_a3() {
        let c = build_code(&CodeParams::Hamming { m: 4 }).unwrap();
        let bf = weight_enumerator(&c, WeMethod::BruteForce).unwrap();
        assert_eq!(counts(&bf)[3], 35);
    }

    #[test]
    fn closed_form_matches_brute_force_small_orders() {
        for m in 2..=4 {
            for params in [CodeParams::Hamming { m }, CodeParams::ExtendedHamming { m }] {
                let c = build_code(&params).unwrap();
                assert_eq!(
                    weight_enumerator(&c, WeMethod::ClosedForm).unwrap(),
                    weight_enumerator(&c, WeMethod::BruteForce).unwrap(),
                    "{params:?}"
                );
            }
        }
    }

    #[test]
    fn spectrum_sums_to_two_to_the_k() {
        for m in 2..=8 {
            for params in [CodeParams::Hamming { m }, CodeParams::ExtendedHamming { m }] {
                let c = build_code(&params).unwrap();
                let ws = weight_enumerator(&c, WeMethod::ClosedForm).unwrap();
                assert_eq!(ws.total(), BigUint::one() << c.k);
                assert!(ws.counts[0].is_one());
                if c.kind == CodeKind::ExtendedHamming {
                    assert!(ws.counts.iter().skip(1).step_by(2).all(Zero::is_zero));
                }
            }
        }
    }

    #[test]
    fn repetition_spectrum() {
        let c = build_code(&CodeParams::Repetition { n: 6 }).unwrap();
        let ws = weight_enumerator(&c, WeMethod::ClosedForm).unwrap();
        assert_eq!(counts(&ws), vec![1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(ws, weight_enumerator(&c, WeMethod::BruteForce).unwrap());
        assert_eq!(min_distance_oracle(&c).unwrap(), 6);
    }

    #[test]
    fn method_errors() {
        let big = build_code(&CodeParams::Hamming { m: 5 }).unwrap();
        assert!(matches!(
            weight_enumerator(&big, WeMethod::BruteForce),
            Err(Error::TooLargeForEnumeration { k: 26, .. })
        ));
        assert!(min_distance_oracle(&big).is_err());
        let custom = build_code(&CodeParams::Custom {
            generator: vec![vec![1, 0, 1], vec![0, 1, 1]],
        })
        .unwrap();
        assert!(matches!(
            weight_enumerator(&custom, WeMethod::ClosedForm),
            Err(Error::NoClosedForm(_))
        ));
    }

    #[test]
    fn minimum_distances() {
        let h = build_code(&CodeParams::Hamming { m: 3 }).unwrap();
        assert_eq!(min_distance_oracle(&h).unwrap(), 3);
        let e = build_code(&CodeParams::ExtendedHamming { m: 3 }).unwrap();
        assert_eq!(min_distance_oracle(&e).unwrap(), 4);
        for m in 2..=4 {
            let c = build_code(&CodeParams::ExtendedHamming { m }).unwrap();
            let ws = weight_enumerator(&c, WeMethod::BruteForce).unwrap();
            assert_eq!(
                ws.min_nonzero_weight(),
                Some(min_distance_oracle(&c).unwrap())
            );
        }
    }

    #[test]
    fn encoding() {
        let c = build_code(&CodeParams::Hamming { m: 3 }).unwrap();
        assert_eq!(c.encode(&[0; 4]).unwrap(), vec![0; 7]);
        for i in 0..4 {
            let mut e = vec![0; 4];
            e[i] = 1;
            assert_eq!(c.encode(&e).unwrap(), c.generator[i]);
        }
        assert!(c.encode(&[1, 0]).is_err());
        let r = build_code(&CodeParams::Repetition { n: 3 }).unwrap();
        assert_eq!(r.encode(&[1]).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn custom_generator_reduced_to_systematic() {
        // Rows span the (7,4) Hamming code in a scrambled order.
        let text = "# scrambled\n1101000\n0110100\n0011010\n0001101\n";
        let g = parse_generator(text).unwrap();
        let c = build_code(&CodeParams::Custom { generator: g }).unwrap();
        assert_eq!((c.n, c.k), (7, 4));
        assert_eq!(c.info_positions, vec![0, 1, 2, 3]);
        for row in &c.generator {
            assert!(c.is_codeword(row));
        }
        let ws = weight_enumerator(&c, WeMethod::BruteForce).unwrap();
        assert_eq!(counts(&ws), vec![1, 0, 0, 7, 7, 0, 0, 1]);
        let msg = [1, 0, 1, 1];
        let cw = c.encode(&msg).unwrap();
        for (i, &p) in c.info_positions.iter().enumerate() {
            assert_eq!(cw[p], msg[i]);
        }
    }

    #[test]
    fn tokens() {
        assert_eq!(
            "hamming:5".parse::<CodeToken>().unwrap(),
            CodeToken::Hamming(5)
        );
        assert_eq!(
            "ehamming:6".parse::<CodeToken>().unwrap(),
            CodeToken::ExtendedHamming(6)
        );
        assert_eq!(
            "rep:3".parse::<CodeToken>().unwrap(),
            CodeToken::Repetition(3)
        );
        assert!("golay:23".parse::<CodeToken>().is_err());
        assert!("hamming".parse::<CodeToken>().is_err());
        assert!("hamming:x".parse::<CodeToken>().is_err());
        assert_eq!(CodeToken::Hamming(5).to_string(), "hamming:5");
    }

    #[test]
    fn big_log_conversion() {
        let x = BigUint::one() << 2000u32;
        assert!((ln_biguint(&x) - 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::zero()), f64::NEG_INFINITY);
    }
}
