//! Published reference values for the six outer codes and brute-force
//! oracles that share no code with `haa`'s enumerators and decoders.

use haa::linear_code::{build_code, BlockCodeSpec, CodeParams};

/// Frame length used for the finite-length runs, rounded down to a multiple of `n`.
pub const NOMINAL_BLOCK_LENGTH: usize = 8184;

#[derive(Debug, Clone, Copy)]
pub struct Reference {
    pub label: &'static str,
    pub extended: bool,
    pub m: u32,
    pub delta_min: f64,
    pub delta_gv: f64,
    pub threshold_db: f64,
    pub capacity_db: f64,
}

const fn reference(label: &'static str, extended: bool, m: u32, values: [f64; 4]) -> Reference {
    Reference {
        label,
        extended,
        m,
        delta_min: values[0],
        delta_gv: values[1],
        threshold_db: values[2],
        capacity_db: values[3],
    }
}

/// Two-accumulator ensembles in order of increasing rate.
pub const REFERENCES: [Reference; 6] = [
    reference("(32,26)AA", true, 5, [0.0197, 0.0286, 3.34, 2.14]),
    reference("(31,26)AA", false, 5, [0.0140, 0.0236, 3.48, 2.39]),
    reference("(64,57)AA", true, 6, [0.0091, 0.0145, 4.10, 3.03]),
    reference("(63,57)AA", false, 6, [0.0067, 0.0122, 4.20, 3.26]),
    reference("(128,120)AA", true, 7, [0.0042, 0.0073, 4.70, 3.93]),
    reference("(127,120)AA", false, 7, [0.0032, 0.0063, 4.79, 4.11]),
];

/// Single-accumulator thresholds: `(Hamming order, dB)`.
pub const SINGLE_STAGE_THRESHOLDS: [(u32, f64); 2] = [(5, 2.81), (6, 3.58)];

impl Reference {
    pub fn code(&self) -> BlockCodeSpec {
        let params = if self.extended {
            CodeParams::ExtendedHamming { m: self.m }
        } else {
            CodeParams::Hamming { m: self.m }
        };
        build_code(&params).expect("reference codes are valid")
    }
}

pub fn nominal_block_length(n: usize) -> usize {
    NOMINAL_BLOCK_LENGTH / n * n
}

/// Running XOR.
pub fn accumulate(u: &[u8]) -> Vec<u8> {
    u.iter()
        .scan(0u8, |s, &b| {
            *s ^= b;
            Some(*s)
        })
        .collect()
}

pub fn bits(x: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((x >> i) & 1) as u8).collect()
}

pub fn weight(v: &[u8]) -> usize {
    v.iter().map(|&b| b as usize).sum()
}

/// `table[w][h]`: inputs of weight `w` whose accumulated output has weight `h`.
pub fn accumulator_iowe_table(n: usize) -> Vec<Vec<u64>> {
    let mut table = vec![vec![0u64; n + 1]; n + 1];
    for x in 0..1usize << n {
        let u = bits(x, n);
        table[weight(&u)][weight(&accumulate(&u))] += 1;
    }
    table
}

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = vec![];
    extend(&mut vec![], &mut vec![false; n], &mut out);
    out
}

fn permute(x: &[u8], p: &[usize]) -> Vec<u8> {
    p.iter().map(|&i| x[i]).collect()
}

/// Average output weight distribution over every message and every
/// interleaver (pair) of an `L`-fold outer code followed by `stages`
/// accumulators.
pub fn exhaustive_ensemble_we(code: &BlockCodeSpec, l: usize, stages: usize) -> Vec<f64> {
    let n = code.n * l;
    let k = code.k * l;
    let perms = permutations(n);
    let words: Vec<Vec<u8>> = (0..1usize << k)
        .map(|m| {
            bits(m, k)
                .chunks(code.k)
                .flat_map(|c| code.encode(c).expect("message length matches"))
                .collect()
        })
        .collect();
    let mut counts = vec![0.0; n + 1];
    let mut trials = 0.0;
    for p1 in &perms {
        let firsts: Vec<Vec<u8>> = words.iter().map(|w| accumulate(&permute(w, p1))).collect();
        if stages == 1 {
            firsts.iter().for_each(|f| counts[weight(f)] += 1.0);
            trials += 1.0;
            continue;
        }
        for p2 in &perms {
            firsts
                .iter()
                .for_each(|f| counts[weight(&accumulate(&permute(f, p2)))] += 1.0);
            trials += 1.0;
        }
    }
    counts.iter().map(|c| c / trials).collect()
}

fn lse(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `[ln P(0), ln P(1)]` for `L = ln(P(0)/P(1))`.
fn log_probs(l: f64) -> [f64; 2] {
    let nat = |x: f64| {
        if x > 0.0 {
            -x - (-x).exp().ln_1p()
        } else {
            -(x.exp().ln_1p())
        }
    };
    [nat(-l), nat(l)]
}

/// `ln Σ_{bit=0} − ln Σ_{bit=1}` of the given per-candidate metrics.
fn split_ratio(terms: &[(u8, f64)]) -> f64 {
    let zero: Vec<f64> = terms.iter().filter(|t| t.0 == 0).map(|t| t.1).collect();
    let one: Vec<f64> = terms.iter().filter(|t| t.0 == 1).map(|t| t.1).collect();
    lse(&zero) - lse(&one)
}

/// Extrinsic LLRs `(inputs, outputs)` of one accumulator by listing all
/// `2^N` input words.
pub fn accumulator_oracle(outputs_llr: &[f64], inputs_apriori: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = outputs_llr.len();
    let lin: Vec<[f64; 2]> = inputs_apriori.iter().map(|&l| log_probs(l)).collect();
    let lout: Vec<[f64; 2]> = outputs_llr.iter().map(|&l| log_probs(l)).collect();
    let words: Vec<(Vec<u8>, Vec<u8>, f64)> = (0..1usize << n)
        .map(|x| {
            let u = bits(x, n);
            let y = accumulate(&u);
            let metric = (0..n)
                .map(|i| lin[i][u[i] as usize] + lout[i][y[i] as usize])
                .sum();
            (u, y, metric)
        })
        .collect();
    let inputs = (0..n)
        .map(|i| {
            let t: Vec<(u8, f64)> = words
                .iter()
                .map(|(u, _, m)| (u[i], m - lin[i][u[i] as usize]))
                .collect();
            split_ratio(&t)
        })
        .collect();
    let outputs = (0..n)
        .map(|i| {
            let t: Vec<(u8, f64)> = words
                .iter()
                .map(|(_, y, m)| (y[i], m - lout[i][y[i] as usize]))
                .collect();
            split_ratio(&t)
        })
        .collect();
    (inputs, outputs)
}

/// Extrinsic LLRs on codeword bits and posterior LLRs on message bits of
/// a block code, by listing the `2^k` codewords through its encoder.
pub fn block_oracle(code: &BlockCodeSpec, apriori: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let lp: Vec<[f64; 2]> = apriori.iter().map(|&l| log_probs(l)).collect();
    let words: Vec<(Vec<u8>, Vec<u8>, f64)> = (0..1usize << code.k)
        .map(|x| {
            let msg = bits(x, code.k);
            let c = code.encode(&msg).expect("message length matches");
            let metric = c.iter().enumerate().map(|(j, &b)| lp[j][b as usize]).sum();
            (msg, c, metric)
        })
        .collect();
    let extrinsic = (0..code.n)
        .map(|j| {
            let t: Vec<(u8, f64)> = words
                .iter()
                .map(|(_, c, m)| (c[j], m - lp[j][c[j] as usize]))
                .collect();
            split_ratio(&t)
        })
        .collect();
    let posteriors = (0..code.k)
        .map(|i| {
            let t: Vec<(u8, f64)> = words.iter().map(|(msg, _, m)| (msg[i], *m)).collect();
            split_ratio(&t)
        })
        .collect();
    (extrinsic, posteriors)
}
