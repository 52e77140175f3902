//! Scenario files: the JSON document shared by the CLI and the HTTP service.
//!
//! ```json
//! {
//!   "scatterers": [{"x": 0, "alpha": 2}],
//!   "coupling_scale": 1,
//!   "spectrum": {"k0": 1, "dk": 0.1, "n_waves": 8},
//!   "grid": {"x_min": -40, "x_max": 40, "n_points": 4001},
//!   "t": 0,
//!   "window": {"x_lo": 15, "x_hi": 35, "max_lag": 4}
//! }
//! ```
//!
//! `t` defaults to 0 and `window` to the transmitted-zone default.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::retardation::AnalysisWindow;
use crate::scattering::{DeltaScatterer, ScattererSet};
use crate::wavefield::{Grid, SpectrumSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub set: ScattererSet,
    pub spectrum: SpectrumSpec,
    pub grid: Grid,
    pub t: f64,
    pub window: Option<AnalysisWindow>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScattererEntry {
    x: f64,
    alpha: f64,
}

fn positive_count<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<usize, D::Error> {
    let n = usize::deserialize(d)?;
    if n == 0 {
        return Err(serde::de::Error::custom("must be >= 1"));
    }
    Ok(n)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumEntry {
    k0: f64,
    dk: f64,
    #[serde(deserialize_with = "positive_count")]
    n_waves: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phases: Option<Vec<f64>>,
}

fn default_coupling() -> f64 {
    1.0
}

/// Wire form of [`Scenario`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    scatterers: Vec<ScattererEntry>,
    #[serde(default = "default_coupling")]
    coupling_scale: f64,
    spectrum: SpectrumEntry,
    grid: Grid,
    #[serde(default)]
    t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<AnalysisWindow>,
}

fn invariant(invariant: &'static str) -> impl FnOnce(Error) -> Error {
    move |err| match err {
        Error::Invariant { .. } => err,
        other => Error::Invariant {
            invariant,
            message: other.to_string(),
        },
    }
}

impl TryFrom<ScenarioDocument> for Scenario {
    type Error = Error;

    fn try_from(doc: ScenarioDocument) -> Result<Self> {
        let scatterers = doc
            .scatterers
            .iter()
            .map(|e| DeltaScatterer::new(e.x, e.alpha))
            .collect();
        let set = ScattererSet::new(scatterers, doc.coupling_scale)
            .map_err(invariant("scatterers.min_separation"))?;
        let spectrum = SpectrumSpec {
            k0: doc.spectrum.k0,
            dk: doc.spectrum.dk,
            n_waves: doc.spectrum.n_waves,
            amplitudes: doc.spectrum.amplitudes,
            phases: doc.spectrum.phases,
        };
        let scenario = Scenario {
            set,
            spectrum,
            grid: doc.grid,
            t: doc.t,
            window: doc.window,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioDocument {
    fn from(s: &Scenario) -> Self {
        ScenarioDocument {
            scatterers: s
                .set
                .scatterers()
                .iter()
                .map(|d| ScattererEntry {
                    x: d.position,
                    alpha: d.strength,
                })
                .collect(),
            coupling_scale: s.set.coupling_scale(),
            spectrum: SpectrumEntry {
                k0: s.spectrum.k0,
                dk: s.spectrum.dk,
                n_waves: s.spectrum.n_waves,
                amplitudes: s.spectrum.amplitudes.clone(),
                phases: s.spectrum.phases.clone(),
            },
            grid: s.grid,
            t: s.t,
            window: s.window,
        }
    }
}

impl Serialize for Scenario {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ScenarioDocument::from(self).serialize(serializer)
    }
}

/// Converts a serde path such as `scatterers[0].x` into `/scatterers/0/x`.
fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut pointer = String::new();
    for segment in path.iter() {
        pointer.push('/');
        match segment {
            Segment::Seq { index } => pointer.push_str(&index.to_string()),
            Segment::Map { key } => pointer.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => pointer.push_str(variant),
            Segment::Unknown => pointer.push('?'),
        }
    }
    if pointer.is_empty() {
        pointer.push('/');
    }
    pointer
}

/// Deserializes `text`, reporting failures as [`Error::Schema`] with a JSON
/// pointer to the offending value.
pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| Error::Schema {
        pointer: json_pointer(err.path()),
        message: err.inner().to_string(),
    })
}

impl Scenario {
    /// Single repulsive delta at the origin probed by eight modes around k = 1.
    pub fn example() -> Self {
        Scenario {
            set: ScattererSet::single(0.0, 2.0),
            spectrum: SpectrumSpec::uniform(1.0, 0.1, 8),
            grid: Grid {
                x_min: -40.0,
                x_max: 40.0,
                n_points: 4001,
            },
            t: 0.0,
            window: None,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Scenario::try_from(parse_json::<ScenarioDocument>(text)?)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let doc: ScenarioDocument =
            serde_path_to_error::deserialize(value).map_err(|err| Error::Schema {
                pointer: json_pointer(err.path()),
                message: err.inner().to_string(),
            })?;
        Scenario::try_from(doc)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.set.is_empty() {
            return Err(Error::Invariant {
                invariant: "scatterers.non_empty",
                message: "at least one scatterer is required".into(),
            });
        }
        self.spectrum.validate().map_err(invariant("spectrum"))?;
        self.grid.validate().map_err(invariant("grid"))?;
        if !self.t.is_finite() {
            return Err(Error::Invariant {
                invariant: "t.finite",
                message: format!("t = {}", self.t),
            });
        }
        if let Some(w) = &self.window {
            w.validate().map_err(invariant("window"))?;
            if w.x_lo - w.max_lag < self.grid.x_min || w.x_hi + w.max_lag > self.grid.x_max {
                return Err(Error::Invariant {
                    invariant: "grid.covers_window",
                    message: format!(
                        "window ± max_lag [{}, {}] leaves grid [{}, {}]",
                        w.x_lo - w.max_lag,
                        w.x_hi + w.max_lag,
                        self.grid.x_min,
                        self.grid.x_max
                    ),
                });
            }
        }
        Ok(())
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_json_str(&text)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scenario.to_json_pretty() + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"scatterers":[{"x":0,"alpha":2}],"coupling_scale":1,"spectrum":{"k0":1,"dk":0.1,"n_waves":8},"grid":{"x_min":-40,"x_max":40,"n_points":4001}}"#;

    #[test]
    fn minimal_document() {
        let s = Scenario::from_json_str(MINIMAL).unwrap();
        assert_eq!(s, Scenario::example());
        assert_eq!(s.t, 0.0);
        assert!(s.window.is_none());
    }

    #[test]
    fn duplicate_positions() {
        let text = MINIMAL.replace(
            r#"[{"x":0,"alpha":2}]"#,
            r#"[{"x":1,"alpha":2},{"x":1,"alpha":3}]"#,
        );
        match Scenario::from_json_str(&text).unwrap_err() {
            Error::Invariant { invariant, .. } => {
                assert_eq!(invariant, "scatterers.min_separation")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_waves_is_a_schema_error() {
        let text = MINIMAL.replace(r#""n_waves":8"#, r#""n_waves":0"#);
        let err = Scenario::from_json_str(&text).unwrap_err();
        assert_eq!(err.pointer(), Some("/spectrum/n_waves"));
        assert_eq!(err.code(), "schema_error");
    }

    #[test]
    fn schema_pointer_into_arrays() {
        let text = MINIMAL.replace(r#""x":0"#, r#""x":"left""#);
        assert_eq!(
            Scenario::from_json_str(&text).unwrap_err().pointer(),
            Some("/scatterers/0/x")
        );
        let text = MINIMAL.replace(r#""coupling_scale":1"#, r#""coupling":1"#);
        assert_eq!(
            Scenario::from_json_str(&text).unwrap_err().code(),
            "schema_error"
        );
    }

    #[test]
    fn invariants_name_the_field() {
        let cases = [
            (MINIMAL.replace(r#""k0":1"#, r#""k0":0"#), "spectrum"),
            (MINIMAL.replace(r#""x_max":40"#, r#""x_max":-50"#), "grid"),
            (
                MINIMAL.replace(r#""coupling_scale":1"#, r#""coupling_scale":-1"#),
                "coupling_scale >= 0",
            ),
            (
                MINIMAL.replace(r#"[{"x":0,"alpha":2}]"#, "[]"),
                "scatterers.non_empty",
            ),
            (
                MINIMAL.replacen(
                    r#""grid""#,
                    r#""window":{"x_lo":30,"x_hi":39,"max_lag":2},"grid""#,
                    1,
                ),
                "grid.covers_window",
            ),
        ];
        for (text, expected) in cases {
            match Scenario::from_json_str(&text).unwrap_err() {
                Error::Invariant { invariant, .. } => assert_eq!(invariant, expected),
                other => panic!("unexpected {other:?} for {text}"),
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let mut s = Scenario::example();
        s.t = 1.25;
        s.spectrum.phases = Some(vec![0.1; 8]);
        s.window = Some(AnalysisWindow {
            x_lo: 10.0,
            x_hi: 30.0,
            max_lag: 3.0,
        });
        save_scenario(&s, &path).unwrap();
        let back = load_scenario(&path).unwrap();
        assert_eq!(back, s);
        save_scenario(&back, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }

    #[test]
    fn missing_file() {
        let err = load_scenario("/definitely/not/here.json").unwrap_err();
        assert_eq!(err.code(), "io_error");
    }
}
