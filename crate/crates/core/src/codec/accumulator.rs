//! Exact BCJR on the two-state trellis of `1/(1+D)`.
//!
//! The trellis starts in state 0 and ends in either state (no termination).
//! The state is the previous output bit; input `u` from state `s` emits
//! `y = u ⊕ s` and moves to state `y`.

use crate::logmath::softplus;
use crate::{Error, Result};

/// `(ln P(0), ln P(1))` from an LLR. Both are `≤ 0`, never `+∞`.
#[inline]
pub(crate) fn bit_log_probs(llr: f64) -> [f64; 2] {
    [-softplus(-llr), -softplus(llr)]
}

/// `a − b` for log-domain numerator/denominator, `0` when both are `-∞`.
#[inline]
pub(crate) fn log_ratio(zero: f64, one: f64) -> f64 {
    if zero == f64::NEG_INFINITY && one == f64::NEG_INFINITY {
        0.0
    } else {
        zero - one
    }
}

fn check(frame: &[f64], what: &'static str) -> Result<()> {
    if frame.iter().any(|x| x.is_nan()) {
        return Err(Error::NanInput(what));
    }
    Ok(())
}

/// Unnormalized `(P(0), P(1))` from an LLR, with the larger entry equal to 1.
#[inline]
fn bit_probs(llr: f64) -> [f64; 2] {
    if llr >= 0.0 {
        [1.0, (-llr).exp()]
    } else {
        [llr.exp(), 1.0]
    }
}

#[inline]
fn normalized(v: [f64; 2]) -> [f64; 2] {
    let s = v[0] + v[1];
    if s > 0.0 {
        [v[0] / s, v[1] / s]
    } else {
        v
    }
}

/// `ln(zero / one)`, `0` when both vanish.
#[inline]
fn ratio_llr(zero: f64, one: f64) -> f64 {
    if zero == 0.0 && one == 0.0 {
        0.0
    } else {
        (zero / one).ln()
    }
}

/// Extrinsic LLRs on the accumulator input and output bits.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatorExtrinsics {
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

/// SISO for the accumulator. `outputs_llr` carries channel or a-priori
/// information on the output bits, `inputs_apriori` on the input bits.
pub fn accumulator_siso(
    outputs_llr: &[f64],
    inputs_apriori: &[f64],
) -> Result<AccumulatorExtrinsics> {
    if outputs_llr.len() != inputs_apriori.len() {
        return Err(Error::LengthMismatch {
            expected: outputs_llr.len(),
            got: inputs_apriori.len(),
        });
    }
    check(outputs_llr, "accumulator output LLRs")?;
    check(inputs_apriori, "accumulator input a-priori LLRs")?;
    let n = outputs_llr.len();
    let mut ext = AccumulatorExtrinsics {
        inputs: vec![0.0; n],
        outputs: vec![0.0; n],
    };
    let mut scratch = Vec::new();
    accumulator_siso_into(
        outputs_llr,
        inputs_apriori,
        &mut ext.inputs,
        &mut ext.outputs,
        &mut scratch,
    );
    Ok(ext)
}

/// Unchecked variant writing into caller buffers; `alpha` is reused scratch.
/// Runs in the probability domain with per-step normalization, which is
/// exact up to rounding and avoids a logarithm per trellis branch.
pub(crate) fn accumulator_siso_into(
    outputs_llr: &[f64],
    inputs_apriori: &[f64],
    ext_inputs: &mut [f64],
    ext_outputs: &mut [f64],
    alpha: &mut Vec<[f64; 2]>,
) {
    let n = outputs_llr.len();
    alpha.clear();
    alpha.reserve(n + 1);
    let mut a = [1.0, 0.0];
    alpha.push(a);
    for i in 0..n {
        let pu = bit_probs(inputs_apriori[i]);
        let py = bit_probs(outputs_llr[i]);
        // Next state y reached from (s = 0, u = y) and (s = 1, u = 1 - y).
        a = normalized([
            (a[0] * pu[0] + a[1] * pu[1]) * py[0],
            (a[0] * pu[1] + a[1] * pu[0]) * py[1],
        ]);
        alpha.push(a);
    }

    let mut b = [1.0, 1.0];
    for i in (0..n).rev() {
        let pu = bit_probs(inputs_apriori[i]);
        let py = bit_probs(outputs_llr[i]);
        let a = alpha[i];
        // Input extrinsic: branch (s, u) lands in state u ⊕ s, excluding pu.
        let (yb0, yb1) = (py[0] * b[0], py[1] * b[1]);
        ext_inputs[i] = ratio_llr(a[0] * yb0 + a[1] * yb1, a[0] * yb1 + a[1] * yb0);
        // Output extrinsic: y fixed, u = y ⊕ s, excluding py.
        ext_outputs[i] = ratio_llr(
            (a[0] * pu[0] + a[1] * pu[1]) * b[0],
            (a[0] * pu[1] + a[1] * pu[0]) * b[1],
        );
        b = normalized([pu[0] * yb0 + pu[1] * yb1, pu[0] * yb1 + pu[1] * yb0]);
    }
}

/// `y_0 = x_0`, `y_i = x_i ⊕ y_{i-1}`, starting from state 0.
pub fn accumulate_bits(input: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; input.len()];
    accumulate_into(input, &mut out);
    out
}

pub(crate) fn accumulate_into(input: &[u8], out: &mut [u8]) {
    let mut state = 0u8;
    for (o, &x) in out.iter_mut().zip(input) {
        state ^= x & 1;
        *o = state;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logmath::log_sum_exp;
    use proptest::prelude::*;

    #[test]
    fn step_responses() {
        assert_eq!(accumulate_bits(&[0, 0, 0, 0]), vec![0, 0, 0, 0]);
        assert_eq!(accumulate_bits(&[1, 0, 0, 0]), vec![1, 1, 1, 1]);
        assert_eq!(accumulate_bits(&[1, 1, 0]), vec![1, 0, 0]);
    }

    #[test]
    fn zero_information_gives_zero_extrinsics() {
        let e = accumulator_siso(&[0.0; 9], &[0.0; 9]).unwrap();
        assert!(e.inputs.iter().chain(&e.outputs).all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn perfect_outputs_determine_inputs() {
        let u = [1u8, 0, 1, 1, 0, 0, 1];
        let y = accumulate_bits(&u);
        let obs: Vec<f64> = y
            .iter()
            .map(|&b| {
                if b == 0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let e = accumulator_siso(&obs, &[0.0; 7]).unwrap();
        for (x, &b) in e.inputs.iter().zip(&u) {
            assert!(x.is_infinite());
            assert_eq!(*x > 0.0, b == 0);
        }
    }

    #[test]
    fn errors() {
        assert!(accumulator_siso(&[0.0; 3], &[0.0; 4]).is_err());
        assert!(accumulator_siso(&[0.0, f64::NAN], &[0.0; 2]).is_err());
    }

    /// Exhaustive posterior over all 2^N input words.
    fn brute_force(outputs: &[f64], inputs: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = outputs.len();
        let lp = |l: f64, b: u8| if b == 0 { -softplus(-l) } else { -softplus(l) };
        let mut in_terms = vec![[vec![], vec![]]; n];
        let mut out_terms = vec![[vec![], vec![]]; n];
        for word in 0u32..(1 << n) {
            let u: Vec<u8> = (0..n).map(|i| ((word >> i) & 1) as u8).collect();
            let y = accumulate_bits(&u);
            for i in 0..n {
                let mut excl_in = 0.0;
                let mut excl_out = 0.0;
                for j in 0..n {
                    if j != i {
                        excl_in += lp(inputs[j], u[j]);
                        excl_out += lp(outputs[j], y[j]);
                    }
                }
                in_terms[i][u[i] as usize]
                    .push(excl_in + (0..n).map(|j| lp(outputs[j], y[j])).sum::<f64>());
                out_terms[i][y[i] as usize]
                    .push(excl_out + (0..n).map(|j| lp(inputs[j], u[j])).sum::<f64>());
            }
        }
        let ratio = |t: &[Vec<f64>; 2]| log_sum_exp(&t[0]) - log_sum_exp(&t[1]);
        (
            in_terms.iter().map(ratio).collect(),
            out_terms.iter().map(ratio).collect(),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn matches_exhaustive_posterior(
            pairs in (1usize..=10).prop_flat_map(|n| (
                prop::collection::vec(-6.0f64..6.0, n),
                prop::collection::vec(-6.0f64..6.0, n),
            ))
        ) {
            let (outputs, inputs) = pairs;
            let e = accumulator_siso(&outputs, &inputs).unwrap();
            let (bi, bo) = brute_force(&outputs, &inputs);
            for (a, b) in e.inputs.iter().zip(&bi).chain(e.outputs.iter().zip(&bo)) {
                prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
            }
        }
    }
}
