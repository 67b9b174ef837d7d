//! Rate evaluators for explicit finite-alphabet auxiliaries.
//!
//! Variables are addressed by name: `T`, `U_c`, `U_r`, `U` (channel input)
//! and `S` (channel state known at the encoder). The two broadcast outputs
//! are appended as `V_c` and `V_r`. Rates are returned unclamped.

use crate::binary::TChoice;
use crate::error::{Error, Result};
use crate::infotheory::{bsc, JointDistribution};
use crate::problem::{Kappa, RateTriple};

/// Conditional mutual information above this counts as a Markov violation.
pub const MARKOV_TOL: f64 = 1e-9;

/// Which receiver a single-receiver bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    Common,
    Refinement,
}

impl Receiver {
    fn output(self) -> &'static str {
        match self {
            Receiver::Common => "V_c",
            Receiver::Refinement => "V_r",
        }
    }
}

/// A joint distribution of the auxiliaries together with the broadcast
/// channel outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeInputs {
    joint: JointDistribution,
    kappa: Kappa,
}

impl SchemeInputs {
    /// `channel_c[u][v] = p(V_c = v | U = u)`, likewise `channel_r`.
    pub fn new(
        joint: JointDistribution,
        channel_c: &[Vec<f64>],
        channel_r: &[Vec<f64>],
        kappa: Kappa,
    ) -> Result<Self> {
        for reserved in ["V_c", "V_r"] {
            if joint.has(reserved) {
                return Err(Error::invalid("joint", "channel outputs are added by SchemeInputs", reserved));
            }
        }
        let joint = joint
            .extend_with_channel("U", "V_c", channel_c)?
            .extend_with_channel("U", "V_r", channel_r)?;
        Ok(SchemeInputs { joint, kappa })
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    fn mi(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        self.joint.mutual_information(a, b, given)
    }

    fn markov(&self, chain: &'static str, a: &[&str], b: &[&str], given: &[&str]) -> Result<()> {
        let value = self.mi(a, b, given)?;
        if value > MARKOV_TOL {
            Err(Error::Markov { chain, value })
        } else {
            Ok(())
        }
    }

    /// `T − (U_r, U_c) − (V_r, V_c)` and `(U_r, U_c) − U − (V_r, V_c)`.
    fn layered_markov(&self) -> Result<()> {
        self.markov("T-(U_r,U_c)-(V_r,V_c)", &["T"], &["V_r", "V_c"], &["U_r", "U_c"])?;
        self.markov("(U_r,U_c)-U-(V_r,V_c)", &["U_r", "U_c"], &["V_r", "V_c"], &["U"])
    }

    fn k(&self) -> f64 {
        self.kappa.as_f64()
    }
}

/// Dirty-paper bound `κ[I(T; V_k) − I(T; S)]` for one receiver.
pub fn cds_dpc_rate_bound(inputs: &SchemeInputs, receiver: Receiver) -> Result<f64> {
    let v = receiver.output();
    Ok(inputs.k() * (inputs.mi(&["T"], &[v], &[])? - inputs.mi(&["T"], &["S"], &[])?))
}

/// Layered scheme:
/// `(κ[I(T;V_c) − I(T;U_r)], κ[I(T;V_r) − I(T;U_r)], κ I(U_r; T, V_r))`.
pub fn lds_rate_triple(inputs: &SchemeInputs) -> Result<RateTriple> {
    inputs.layered_markov()?;
    let leak = inputs.mi(&["T"], &["U_r"], &[])?;
    Ok(RateTriple::new(
        inputs.mi(&["T"], &["V_c"], &[])? - leak,
        inputs.mi(&["T"], &["V_r"], &[])? - leak,
        inputs.mi(&["U_r"], &["T", "V_r"], &[])?,
    )
    .scaled(inputs.k()))
}

/// Superposition without dirty-paper coding:
/// `(κ I(U_c;V_c), κ I(U_c;V_r), κ I(U;V_r | U_c))`.
pub fn scheme1_rate_triple(inputs: &SchemeInputs) -> Result<RateTriple> {
    inputs.markov("U_c-U-(V_c,V_r)", &["U_c"], &["V_c", "V_r"], &["U"])?;
    Ok(RateTriple::new(
        inputs.mi(&["U_c"], &["V_c"], &[])?,
        inputs.mi(&["U_c"], &["V_r"], &[])?,
        inputs.mi(&["U"], &["V_r"], &["U_c"])?,
    )
    .scaled(inputs.k()))
}

/// Refinement layer dirty-paper coded against the common codeword:
/// `(κ I(U_c;V_c), κ I(U_c; T, V_r), κ[I(T;V_r) − I(T;U_c)])`.
pub fn scheme2_rate_triple(inputs: &SchemeInputs) -> Result<RateTriple> {
    inputs.layered_markov()?;
    Ok(RateTriple::new(
        inputs.mi(&["U_c"], &["V_c"], &[])?,
        inputs.mi(&["U_c"], &["T", "V_r"], &[])?,
        inputs.mi(&["T"], &["V_r"], &[])? - inputs.mi(&["T"], &["U_c"], &[])?,
    )
    .scaled(inputs.k()))
}

/// Reversed decoding order at the refinement receiver:
/// `(κ[I(T;V_c) − I(T;U_r)], κ I(T;V_r | U_r), κ I(U_r;V_r))`.
pub fn scheme3_rate_triple(inputs: &SchemeInputs) -> Result<RateTriple> {
    inputs.layered_markov()?;
    Ok(RateTriple::new(
        inputs.mi(&["T"], &["V_c"], &[])? - inputs.mi(&["T"], &["U_r"], &[])?,
        inputs.mi(&["T"], &["V_r"], &["U_r"])?,
        inputs.mi(&["U_r"], &["V_r"], &[])?,
    )
    .scaled(inputs.k()))
}

/// Binary superposition `U = U_c ⊕ U_r` with independent `U_c ~ Ber(γ_c)`,
/// `U_r ~ Ber(γ_r)`, state `S = U_r`, and `T` chosen by `t`. The outputs are
/// BSC(p_c) and BSC(p_r).
pub fn binary_superposition(
    gamma_c: f64,
    gamma_r: f64,
    t: TChoice,
    p_c: f64,
    p_r: f64,
    kappa: Kappa,
) -> Result<SchemeInputs> {
    let ber = |g: f64, x: usize| if x == 1 { g } else { 1.0 - g };
    let vars = [("U_c", 2), ("U_r", 2), ("U", 2), ("T", 2), ("S", 2)];
    let joint = JointDistribution::from_fn(&vars, |i| {
        let (uc, ur, u, tv, s) = (i[0], i[1], i[2], i[3], i[4]);
        let t_of = match t {
            TChoice::Common => uc,
            TChoice::Xor => uc ^ ur,
        };
        if u == uc ^ ur && tv == t_of && s == ur {
            ber(gamma_c, uc) * ber(gamma_r, ur)
        } else {
            0.0
        }
    })?;
    SchemeInputs::new(joint, &bsc(p_c), &bsc(p_r), kappa)
}
