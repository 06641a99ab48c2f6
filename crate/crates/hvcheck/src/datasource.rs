//! Hecke eigenvalues and curve data, from the bundled snapshot or the LMFDB
//! JSON API.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::thread;
use std::time::Duration;

use hvcheck_core::elliptic::{ap_naive, EllipticError, WeierstrassCurve};
use hvcheck_core::{is_prime, primes_up_to};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const SNAPSHOT_ENV: &str = "HVCHECK_SNAPSHOT";
const BUNDLED: &str = include_str!("../data/lmfdb_snapshot.json");

pub const WEIGHT_FOUR: &str = "14.4.a.a";
pub const WEIGHT_TWO: &str = "14.2.a.a";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("malformed label {0:?}")]
    BadLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("{label}: no eigenvalue at p = {p}")]
    MissingPrime { label: String, p: u64 },
    #[error("{label}: |a_{p}| = {value} violates the Deligne bound")]
    Bound { label: String, p: u64, value: i64 },
    #[error("unsupported snapshot schema {0}")]
    Schema(u32),
    #[error("{label}: {source}")]
    Curve { label: String, source: EllipticError },
    #[error("snapshot json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("snapshot file: {0}")]
    Io(#[from] std::io::Error),
    #[error("network: {0}")]
    Network(String),
    #[error("unexpected response for {label}: {reason}")]
    Response { label: String, reason: String },
}

/// A newform with rational eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewformRecord {
    pub label: String,
    pub weight: u32,
    pub level: u64,
    /// `(p, a_p)` sorted by `p`
    pub eigenvalues: Vec<(u64, i64)>,
}

impl NewformRecord {
    pub fn eigenvalue(&self, p: u64) -> Result<i64, DataError> {
        self.eigenvalues
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.eigenvalues[i].1)
            .map_err(|_| DataError::MissingPrime { label: self.label.clone(), p })
    }

    /// `a_p^2 <= 4 p^(k-1)` at primes not dividing the level.
    pub fn check_bounds(&self) -> Result<(), DataError> {
        for &(p, a) in &self.eigenvalues {
            if self.level % p == 0 {
                continue;
            }
            let bound = 4 * (p as i128).pow(self.weight - 1);
            if (a as i128) * (a as i128) > bound {
                return Err(DataError::Bound { label: self.label.clone(), p, value: a });
            }
        }
        Ok(())
    }
}

/// A curve over `Q` with rank and `L(E,1)/Omega`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCurveRecord {
    pub label: String,
    pub a_invariants: [i64; 5],
    pub rank: u32,
    #[serde(with = "ratio_text")]
    pub l_ratio: Option<Rational64>,
}

impl EllipticCurveRecord {
    pub fn curve(&self) -> Result<WeierstrassCurve, DataError> {
        WeierstrassCurve::new(self.a_invariants).map_err(|source| DataError::Curve { label: self.label.clone(), source })
    }
}

mod ratio_text {
    use std::str::FromStr;

    use num_rational::Rational64;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational64>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| Rational64::from_str(&s).map_err(|e| D::Error::custom(format!("ratio {s:?}: {e}"))))
            .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub schema_version: u32,
    pub retrieved: String,
    pub newforms: BTreeMap<String, NewformRecord>,
    pub curves: BTreeMap<String, EllipticCurveRecord>,
}

impl Snapshot {
    pub fn parse(text: &str) -> Result<Self, DataError> {
        let s: Snapshot = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String, DataError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DataError::Schema(self.schema_version));
        }
        for f in self.newforms.values() {
            f.check_bounds()?;
        }
        for c in self.curves.values() {
            c.curve()?;
        }
        Ok(())
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled snapshot is valid")
    }

    pub fn load(path: &Path) -> Result<Self, DataError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The file named by `HVCHECK_SNAPSHOT` if set, else the bundled copy.
    pub fn from_env() -> Result<Self, DataError> {
        match std::env::var_os(SNAPSHOT_ENV) {
            Some(path) => Self::load(Path::new(&path)),
            None => Ok(Self::bundled()),
        }
    }

    pub fn newform(&self, label: &str) -> Result<&NewformRecord, DataError> {
        check_newform_label(label)?;
        self.newforms.get(label).ok_or_else(|| DataError::UnknownLabel(label.into()))
    }

    pub fn curve(&self, label: &str) -> Result<&EllipticCurveRecord, DataError> {
        check_curve_label(label)?;
        self.curves.get(label).ok_or_else(|| DataError::UnknownLabel(label.into()))
    }
}

fn is_num(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_alpha(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase())
}

/// `level.weight.char.orbit`, e.g. `14.4.a.a`.
pub fn check_newform_label(label: &str) -> Result<(), DataError> {
    let parts: Vec<&str> = label.split('.').collect();
    match parts[..] {
        [n, k, c, o] if is_num(n) && is_num(k) && is_alpha(c) && is_alpha(o) => Ok(()),
        _ => Err(DataError::BadLabel(label.into())),
    }
}

/// `conductor.class index`, e.g. `350.f1`.
pub fn check_curve_label(label: &str) -> Result<(), DataError> {
    let Some((n, rest)) = label.split_once('.') else {
        return Err(DataError::BadLabel(label.into()));
    };
    let split = rest.find(|c: char| c.is_ascii_digit()).unwrap_or(rest.len());
    let (class, index) = rest.split_at(split);
    if is_num(n) && is_alpha(class) && is_num(index) {
        Ok(())
    } else {
        Err(DataError::BadLabel(label.into()))
    }
}

/// Endpoints and retry policy of the online client.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OnlineConfig {
    pub base_url: String,
    /// `{label}` is substituted
    pub newform_path: String,
    pub curve_path: String,
    pub retries: u32,
    pub backoff_ms: u64,
    pub timeout_secs: u64,
    /// field holding `L(E,1)/Omega` in curve responses, if the API has one
    pub l_ratio_field: Option<String>,
}

impl Default for OnlineConfig {
    fn default() -> Self {
        OnlineConfig {
            base_url: "https://www.lmfdb.org/api".into(),
            newform_path: "mf_newforms/?label={label}&_format=json".into(),
            curve_path: "ec_curvedata/?lmfdb_label={label}&_format=json".into(),
            retries: 3,
            backoff_ms: 500,
            timeout_secs: 30,
            l_ratio_field: None,
        }
    }
}

impl OnlineConfig {
    pub fn load(path: &Path) -> Result<Self, DataError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Blocking LMFDB client. Requests are issued one at a time.
pub struct OnlineClient {
    config: OnlineConfig,
    agent: ureq::Agent,
}

impl OnlineClient {
    pub fn new(config: OnlineConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        OnlineClient { config, agent }
    }

    pub fn config(&self) -> &OnlineConfig {
        &self.config
    }

    fn url(&self, path: &str, label: &str) -> String {
        format!("{}/{}", self.config.base_url.trim_end_matches('/'), path.replace("{label}", label))
    }

    /// GET with retries on transport errors and 5xx responses.
    fn get(&self, url: &str) -> Result<String, DataError> {
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                thread::sleep(Duration::from_millis(self.config.backoff_ms << (attempt - 1).min(6)));
            }
            match self.agent.get(url).call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if status == 200 {
                        return resp.body_mut().read_to_string().map_err(|e| DataError::Network(e.to_string()));
                    }
                    last = format!("HTTP {status} from {url}");
                    if status < 500 {
                        break;
                    }
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(DataError::Network(last))
    }

    pub fn fetch_newform(&self, label: &str) -> Result<NewformRecord, DataError> {
        check_newform_label(label)?;
        let body = self.get(&self.url(&self.config.newform_path, label))?;
        let record = parse_newform_response(label, &body)?;
        record.check_bounds()?;
        Ok(record)
    }

    pub fn fetch_curve(&self, label: &str) -> Result<EllipticCurveRecord, DataError> {
        check_curve_label(label)?;
        let body = self.get(&self.url(&self.config.curve_path, label))?;
        let record = parse_curve_response(label, &body, self.config.l_ratio_field.as_deref())?;
        record.curve()?;
        Ok(record)
    }
}

fn first_row<'a>(label: &str, v: &'a Value) -> Result<&'a Value, DataError> {
    let rows = v.get("data").and_then(Value::as_array).ok_or_else(|| DataError::Response {
        label: label.into(),
        reason: "no data array".into(),
    })?;
    rows.first().ok_or_else(|| DataError::UnknownLabel(label.into()))
}

fn as_int(v: &Value) -> Option<i64> {
    v.as_i64().or_else(|| v.as_str().and_then(|s| s.parse().ok()))
}

fn field<'a>(label: &str, row: &'a Value, name: &str) -> Result<&'a Value, DataError> {
    row.get(name).ok_or_else(|| DataError::Response { label: label.into(), reason: format!("missing field {name}") })
}

/// Reads `{"data": [{"weight", "level", "traces"}]}`, taking `a_p` from the
/// trace list (indexed from `n = 1`) for primes up to 200.
pub fn parse_newform_response(label: &str, body: &str) -> Result<NewformRecord, DataError> {
    let v: Value = serde_json::from_str(body)?;
    let row = first_row(label, &v)?;
    let bad = |reason: &str| DataError::Response { label: label.into(), reason: reason.into() };
    let weight = as_int(field(label, row, "weight")?).ok_or_else(|| bad("weight"))? as u32;
    let level = as_int(field(label, row, "level")?).ok_or_else(|| bad("level"))? as u64;
    let traces = field(label, row, "traces")?.as_array().ok_or_else(|| bad("traces"))?;
    let mut eigenvalues = Vec::new();
    for p in primes_up_to(200) {
        let a = traces.get(p as usize - 1).and_then(as_int).ok_or_else(|| bad("trace list too short"))?;
        eigenvalues.push((p, a));
    }
    Ok(NewformRecord { label: label.into(), weight, level, eigenvalues })
}

/// Reads `{"data": [{"ainvs", "rank"}]}`.
pub fn parse_curve_response(label: &str, body: &str, l_ratio_field: Option<&str>) -> Result<EllipticCurveRecord, DataError> {
    let v: Value = serde_json::from_str(body)?;
    let row = first_row(label, &v)?;
    let bad = |reason: &str| DataError::Response { label: label.into(), reason: reason.into() };
    let ainvs = field(label, row, "ainvs")?.as_array().ok_or_else(|| bad("ainvs"))?;
    let a: Vec<i64> = ainvs.iter().map(as_int).collect::<Option<_>>().ok_or_else(|| bad("ainvs"))?;
    let a_invariants: [i64; 5] = a.try_into().map_err(|_| bad("expected five a-invariants"))?;
    let rank = as_int(field(label, row, "rank")?).ok_or_else(|| bad("rank"))? as u32;
    let l_ratio = match l_ratio_field.and_then(|f| row.get(f)) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(Rational64::from_str(s).map_err(|_| bad("l_ratio"))?),
        Some(x) => Some(Rational64::from_integer(as_int(x).ok_or_else(|| bad("l_ratio"))?)),
    };
    Ok(EllipticCurveRecord { label: label.into(), a_invariants, rank, l_ratio })
}

/// Where records come from.
pub enum Source {
    Offline(Snapshot),
    Online { client: OnlineClient, cache: Snapshot },
}

impl Source {
    pub fn fetch_newform(&mut self, label: &str) -> Result<NewformRecord, DataError> {
        match self {
            Source::Offline(s) => s.newform(label).cloned(),
            Source::Online { client, cache } => {
                let r = client.fetch_newform(label)?;
                cache.newforms.insert(label.into(), r.clone());
                Ok(r)
            }
        }
    }

    pub fn fetch_curve(&mut self, label: &str) -> Result<EllipticCurveRecord, DataError> {
        match self {
            Source::Offline(s) => s.curve(label).cloned(),
            Source::Online { client, cache } => {
                let r = client.fetch_curve(label)?;
                cache.curves.insert(label.into(), r.clone());
                Ok(r)
            }
        }
    }

    pub fn snapshot(&self) -> &Snapshot {
        match self {
            Source::Offline(s) => s,
            Source::Online { cache, .. } => cache,
        }
    }
}

/// Naive traces of a curve against the eigenvalues of a weight-2 form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Crosscheck {
    pub checked: Vec<u64>,
    pub skipped: Vec<u64>,
    /// `(p, from the form, counted)`
    pub mismatches: Vec<(u64, i64, i64)>,
}

impl Crosscheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn crosscheck_with(form: &NewformRecord, curve: &WeierstrassCurve, pmax: u64) -> Result<Crosscheck, DataError> {
    let mut out = Crosscheck::default();
    for p in primes_up_to(pmax) {
        if p == 2 || form.level % p == 0 || !curve.has_good_reduction(p) {
            out.skipped.push(p);
            continue;
        }
        let expected = form.eigenvalue(p)?;
        let counted = ap_naive(curve, p).map_err(|source| DataError::Curve { label: form.label.clone(), source })?;
        out.checked.push(p);
        if counted != expected {
            out.mismatches.push((p, expected, counted));
        }
    }
    Ok(out)
}

/// `a_p(14.a4)` against the eigenvalues of 14.2.a.a for good `p <= pmax`.
pub fn crosscheck_eigenvalues(snapshot: &Snapshot, pmax: u64) -> Result<Crosscheck, DataError> {
    crosscheck_with(snapshot.newform(WEIGHT_TWO)?, &snapshot.curve("14.a4")?.curve()?, pmax)
}

/// `(a_p, b_p)` for a good prime.
pub fn eigenvalue_pair(snapshot: &Snapshot, p: u64) -> Result<(i64, i64), DataError> {
    debug_assert!(is_prime(p));
    Ok((snapshot.newform(WEIGHT_FOUR)?.eigenvalue(p)?, snapshot.newform(WEIGHT_TWO)?.eigenvalue(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_values() {
        let s = Snapshot::bundled();
        assert_eq!(eigenvalue_pair(&s, 3).unwrap(), (8, -2));
        assert_eq!(eigenvalue_pair(&s, 113).unwrap(), (1378, 6));
        assert_eq!(s.newform(WEIGHT_TWO).unwrap().eigenvalue(17).unwrap(), 6);
        assert_eq!(s.curve("14.a4").unwrap().a_invariants, [1, 0, 1, -11, 12]);
        assert_eq!(s.curve("350.f1").unwrap().l_ratio, Some(Rational64::from_integer(9)));
        assert!(matches!(s.newform("99.99.z.z"), Err(DataError::UnknownLabel(_))));
        assert!(matches!(s.newform("14.4"), Err(DataError::BadLabel(_))));
        assert!(matches!(s.curve("14a4"), Err(DataError::BadLabel(_))));
    }

    #[test]
    fn labels() {
        for l in ["14.4.a.a", "34.4.b.a"] {
            check_newform_label(l).unwrap();
        }
        for l in ["14.a4", "350.f1", "11.a"] {
            assert_eq!(check_curve_label(l).is_ok(), l != "11.a", "{l}");
        }
    }

    #[test]
    fn deligne_bound() {
        let mut f = Snapshot::bundled().newform(WEIGHT_FOUR).unwrap().clone();
        f.check_bounds().unwrap();
        f.eigenvalues[1].1 = 11; // 11^2 > 4 * 27
        assert!(matches!(f.check_bounds(), Err(DataError::Bound { p: 3, .. })));
        f.eigenvalues[1].1 = 10;
        f.check_bounds().unwrap();
    }

    #[test]
    fn crosscheck_small() {
        let s = Snapshot::bundled();
        let r = crosscheck_eigenvalues(&s, 7).unwrap();
        assert_eq!(r.checked, [3, 5]);
        assert_eq!(r.skipped, [2, 7]);
        assert!(r.passed());
    }

    #[test]
    fn canned_responses() {
        let traces: Vec<i64> = (1..=200).map(|n| if n == 3 { 8 } else { 0 }).collect();
        let body = serde_json::json!({"data": [{"label": "14.4.a.a", "weight": 4, "level": 14, "traces": traces}]});
        let r = parse_newform_response("14.4.a.a", &body.to_string()).unwrap();
        assert_eq!(r.eigenvalue(3).unwrap(), 8);
        assert_eq!(r.eigenvalues.len(), 46);
        assert!(matches!(parse_newform_response("x", r#"{"data": []}"#), Err(DataError::UnknownLabel(_))));
        let body = r#"{"data": [{"ainvs": ["1", "1", "1", "-68263", "-6893219"], "rank": 0, "ratio": "9"}]}"#;
        let c = parse_curve_response("350.f1", body, Some("ratio")).unwrap();
        assert_eq!(c.a_invariants, [1, 1, 1, -68263, -6_893_219]);
        assert_eq!(c.l_ratio, Some(Rational64::from_integer(9)));
        assert_eq!(parse_curve_response("350.f1", body, None).unwrap().l_ratio, None);
        assert!(parse_curve_response("350.f1", r#"{"data": [{"ainvs": [1, 2], "rank": 0}]}"#, None).is_err());
    }
}
