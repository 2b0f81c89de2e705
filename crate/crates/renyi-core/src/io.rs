//! JSON interchange for states, operators and channels, extended-real
//! serialization, and the list/grid syntax used on the command line.
//!
//! A state file is
//!
//! ```json
//! {"layout":[{"label":"A","dim":2}],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]],"normalized":true}
//! ```
//!
//! and a channel file carries `in_layout`, `out_layout` and a `kraus` list of
//! matrices in the same entry format, plus optional structural `tags`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channel::{ChannelTag, QuantumChannel, CPTP_TOL};
use crate::entropic::{EntropyResult, Witness};
use crate::error::{Error, Result};
use crate::layout::{RegisterLayout, MAX_TOTAL_DIM};
use crate::linalg::{self, Mat, C64};
use crate::operator::{DensityOperator, QOperator};

/// Rows of `[re, im]` pairs.
pub type MatrixRepr = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_repr(m: &Mat) -> MatrixRepr {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Dense matrix of the given shape; ragged rows and non-finite entries are rejected.
pub fn matrix_from_repr(rows: &MatrixRepr, nrows: usize, ncols: usize) -> Result<Mat> {
    if rows.len() != nrows {
        return Err(Error::Parse(format!("expected {nrows} rows, found {}", rows.len())));
    }
    let mut m = linalg::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Parse(format!("row {i} has {} entries, expected {ncols}", row.len())));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::Parse(format!("entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

fn check_dim(layout: &RegisterLayout) -> Result<usize> {
    let n = layout.total_dim();
    if n > MAX_TOTAL_DIM {
        return Err(Error::DimensionLimit(n));
    }
    Ok(n)
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub layout: RegisterLayout,
    pub matrix: MatrixRepr,
    #[serde(default = "default_true")]
    pub normalized: bool,
}

impl StateFile {
    pub fn from_state(rho: &DensityOperator) -> Self {
        StateFile {
            layout: rho.layout().clone(),
            matrix: matrix_to_repr(rho.matrix()),
            normalized: rho.is_normalized(),
        }
    }

    /// Hermitian operator with no positivity or trace requirement, e.g. a `σ` argument.
    pub fn to_operator(&self) -> Result<QOperator> {
        let n = check_dim(&self.layout)?;
        QOperator::new(self.layout.clone(), matrix_from_repr(&self.matrix, n, n)?)
    }

    pub fn to_state(&self) -> Result<DensityOperator> {
        DensityOperator::from_operator(self.to_operator()?, self.normalized)
    }
}

/// Structural tags as written in channel files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TagRepr {
    ProbabilisticLeakage { delta: f64, dim_r: usize },
    PinchedInput,
}

impl From<&ChannelTag> for TagRepr {
    fn from(t: &ChannelTag) -> Self {
        match *t {
            ChannelTag::ProbabilisticLeakage { delta, dim_r } => TagRepr::ProbabilisticLeakage { delta, dim_r },
            ChannelTag::PinchedInput => TagRepr::PinchedInput,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub in_layout: RegisterLayout,
    pub out_layout: RegisterLayout,
    pub kraus: Vec<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<TagRepr>,
}

impl ChannelFile {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        ChannelFile {
            in_layout: ch.in_layout().clone(),
            out_layout: ch.out_layout().clone(),
            kraus: ch.kraus().iter().map(matrix_to_repr).collect(),
            tags: ch.tags().iter().map(TagRepr::from).collect(),
        }
    }

    /// Builds and checks the channel. A `pinched_input` tag is verified against
    /// the Choi matrix; a leakage tag is checked for consistency with the input
    /// dimension and otherwise taken as declared.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let din = check_dim(&self.in_layout)?;
        let dout = check_dim(&self.out_layout)?;
        if self.kraus.len() > din * dout {
            return Err(Error::Parse(format!(
                "{} Kraus operators exceed the Choi rank bound {}",
                self.kraus.len(),
                din * dout
            )));
        }
        let kraus = self
            .kraus
            .iter()
            .map(|k| matrix_from_repr(k, dout, din))
            .collect::<Result<Vec<_>>>()?;
        let mut ch = QuantumChannel::new(self.in_layout.clone(), self.out_layout.clone(), kraus)?;
        for t in &self.tags {
            let tag = match *t {
                TagRepr::ProbabilisticLeakage { delta, dim_r } => {
                    if !(0.0..=1.0).contains(&delta) {
                        return Err(Error::Parse(format!("leakage probability {delta} outside [0, 1]")));
                    }
                    if dim_r != din {
                        return Err(Error::Parse(format!(
                            "leakage tag declares dim_r = {dim_r}, channel input has dimension {din}"
                        )));
                    }
                    ChannelTag::ProbabilisticLeakage { delta, dim_r }
                }
                TagRepr::PinchedInput => {
                    let pinched = QuantumChannel::pinching(self.in_layout.clone()).then(&ch)?;
                    if linalg::max_abs_diff(&pinched.choi(), &ch.choi()) > CPTP_TOL {
                        return Err(Error::Parse("pinched_input tag does not match the channel".into()));
                    }
                    ChannelTag::PinchedInput
                }
            };
            if !ch.tags().contains(&tag) {
                ch = ch.with_tag(tag);
            }
        }
        Ok(ch)
    }
}

pub fn parse_state(text: &str) -> Result<DensityOperator> {
    from_json::<StateFile>(text)?.to_state()
}

pub fn parse_operator(text: &str) -> Result<QOperator> {
    from_json::<StateFile>(text)?.to_operator()
}

pub fn parse_channel(text: &str) -> Result<QuantumChannel> {
    from_json::<ChannelFile>(text)?.to_channel()
}

pub fn state_to_json(rho: &DensityOperator) -> String {
    serde_json::to_string(&StateFile::from_state(rho)).expect("state serializes")
}

pub fn channel_to_json(ch: &QuantumChannel) -> String {
    serde_json::to_string(&ChannelFile::from_channel(ch)).expect("channel serializes")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRepr {
    pub name: String,
    pub state: StateFile,
}

impl From<&Witness> for WitnessRepr {
    fn from(w: &Witness) -> Self {
        WitnessRepr {
            name: w.name.clone(),
            state: StateFile::from_state(&w.state),
        }
    }
}

/// Serializable form of an [`EntropyResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRepr {
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub witnesses: Vec<WitnessRepr>,
    #[serde(with = "ext_f64")]
    pub residual: f64,
    pub iterations: usize,
    pub flags: Vec<String>,
}

impl From<&EntropyResult> for ResultRepr {
    fn from(r: &EntropyResult) -> Self {
        ResultRepr {
            value: r.value,
            witnesses: r.witnesses.iter().map(WitnessRepr::from).collect(),
            residual: r.residual,
            iterations: r.iterations,
            flags: r.flags.iter().map(|f| format!("{f:?}")).collect(),
        }
    }
}

/// An extended real as JSON: finite values are numbers, the rest the strings
/// `"inf"`, `"-inf"` and `"nan"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtReal {
    Num(f64),
    Word(String),
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            ExtReal::Num(v)
        } else if v.is_nan() {
            ExtReal::Word("nan".into())
        } else if v > 0.0 {
            ExtReal::Word("inf".into())
        } else {
            ExtReal::Word("-inf".into())
        }
    }
}

impl TryFrom<ExtReal> for f64 {
    type Error = Error;
    fn try_from(e: ExtReal) -> Result<f64> {
        match e {
            ExtReal::Num(v) => Ok(v),
            ExtReal::Word(w) => parse_real(&w),
        }
    }
}

/// `#[serde(with = "ext_f64")]` for `f64` fields that may be infinite.
pub mod ext_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExtReal::from(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        f64::try_from(ExtReal::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

pub mod ext_f64_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.map(ExtReal::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
        Option::<ExtReal>::deserialize(d)?
            .map(f64::try_from)
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

pub mod ext_f64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|&x| ExtReal::from(x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
        Vec::<ExtReal>::deserialize(d)?
            .into_iter()
            .map(f64::try_from)
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)
    }
}

/// A real number, also accepting `inf`, `+inf`, `-inf`, `infinity` and `nan`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        "nan" => return Ok(f64::NAN),
        _ => {}
    }
    t.parse::<f64>().map_err(|_| Error::Parse(format!("'{s}' is not a number")))
}

/// Longest list the list and grid parsers will expand.
pub const MAX_LIST_LEN: usize = 100_000;

/// Comma-separated reals where `vxk` repeats `v` k times: `"0.01x100"`, `"1,2x3,inf"`.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::Parse(format!("empty item in list '{s}'")));
        }
        let (value, count) = match item.rsplit_once(['x', '*']) {
            Some((v, k)) => {
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad repeat count in '{item}'")))?;
                if k == 0 {
                    return Err(Error::Parse(format!("repeat count in '{item}' must be positive")));
                }
                (parse_real(v)?, k)
            }
            None => (parse_real(item)?, 1),
        };
        if value.is_nan() {
            return Err(Error::Parse(format!("NaN in list '{s}'")));
        }
        if out.len() + count > MAX_LIST_LEN {
            return Err(Error::Parse(format!("list expands to more than {MAX_LIST_LEN} values")));
        }
        out.extend(std::iter::repeat_n(value, count));
    }
    Ok(out)
}

/// Comma-separated positive integers.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let dims = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("'{x}' is not a dimension")))
        })
        .collect::<Result<Vec<_>>>()?;
    if dims.contains(&0) {
        return Err(Error::Parse("dimensions must be positive".into()));
    }
    Ok(dims)
}

/// Grid of points: `log:a:b:n` (n points from 10^a to 10^b), `linear:a:b:n`
/// (n points from a to b), or an explicit list as in [`parse_real_list`].
/// Grids need finite endpoints and at least one point; a single point is `a`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    let (kind, rest) = match t.split_once(':') {
        Some((k, r)) if k == "log" || k == "linear" => (k, r),
        _ => return parse_real_list(t),
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("grid '{s}' needs the form {kind}:a:b:n")));
    }
    let a = parse_real(parts[0])?;
    let b = parse_real(parts[1])?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad point count in '{s}'")))?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Parse(format!("grid '{s}' has non-finite endpoints")));
    }
    if n == 0 || n > MAX_LIST_LEN {
        return Err(Error::Parse(format!("grid point count {n} outside 1..={MAX_LIST_LEN}")));
    }
    let point = |i: usize| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    let out: Vec<f64> = match kind {
        "log" => (0..n).map(|i| 10f64.powf(point(i))).collect(),
        _ => (0..n).map(point).collect(),
    };
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse(format!("grid '{s}' overflows")));
    }
    Ok(out)
}
