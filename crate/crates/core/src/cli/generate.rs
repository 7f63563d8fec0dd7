//! Seeded random instances for experiments and regression suites.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{BilinearTerm, InstanceSpec, ObjectiveSpec, SpaceSpec, UncertainInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Table objective over explicit `Ω ⊂ R` and `𝒰 ⊂ R`, values on `[0, 10]`.
    TableRandom,
    /// Bilinear objective over explicit random points, coefficients on `[-1, 1]`.
    BilinearRandom,
    /// Block-structured bilinear objective over a grid `𝒰`.
    ObjectiveWiseRandom,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::TableRandom => "table_random",
            GeneratorKind::BilinearRandom => "bilinear_random",
            GeneratorKind::ObjectiveWiseRandom => "objective_wise_random",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            GeneratorKind::TableRandom,
            GeneratorKind::BilinearRandom,
            GeneratorKind::ObjectiveWiseRandom,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown generator kind `{s}`")))
    }
}

/// Sizes for [`generate_instance`].
///
/// `scenarios` is `|𝒰|` for explicit uncertainty sets and the number of
/// points per axis for the objective-wise grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sizes {
    pub decisions: usize,
    pub scenarios: usize,
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            decisions: 4,
            scenarios: 3,
            n: 1,
            m: 2,
            k: 1,
        }
    }
}

pub fn generate_instance(kind: GeneratorKind, sizes: Sizes, seed: u64) -> Result<UncertainInstance> {
    let Sizes {
        decisions,
        scenarios,
        n,
        m,
        k,
    } = sizes;
    for (name, v) in [("decisions", decisions), ("scenarios", scenarios), ("n", n), ("m", m), ("k", k)] {
        if v == 0 {
            return Err(Error::InvalidArgument(format!("{name} must be positive")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = format!("{kind}-{seed}");

    let spec = match kind {
        GeneratorKind::TableRandom => {
            let values = (0..decisions)
                .map(|_| {
                    (0..scenarios)
                        .map(|_| (0..m).map(|_| rng.random_range(0.0..=10.0)).collect())
                        .collect()
                })
                .collect();
            InstanceSpec {
                name,
                n: 1,
                m,
                k: 1,
                omega: index_space(decisions),
                uncertainty: index_space(scenarios),
                objective: ObjectiveSpec::Table { values },
            }
        }
        GeneratorKind::BilinearRandom => {
            let omega = random_space(&mut rng, decisions, n);
            let uncertainty = random_space(&mut rng, scenarios, k);
            let terms = (0..m).map(|_| random_term(&mut rng, n, k, 0..k)).collect();
            InstanceSpec {
                name,
                n,
                m,
                k,
                omega,
                uncertainty,
                objective: ObjectiveSpec::Bilinear { terms },
            }
        }
        GeneratorKind::ObjectiveWiseRandom => {
            if k < m {
                return Err(Error::InvalidArgument(format!(
                    "objective-wise instances need k >= m, got k = {k}, m = {m}"
                )));
            }
            if scenarios < 2 {
                return Err(Error::InvalidArgument(
                    "objective-wise instances need at least 2 scenario values per axis".into(),
                ));
            }
            let mut blocks = vec![k / m; m];
            blocks[0] += k % m;
            let omega = random_space(&mut rng, decisions, n);
            let mut start = 0;
            let terms = blocks
                .iter()
                .map(|&b| {
                    let t = random_term(&mut rng, n, k, start..start + b);
                    start += b;
                    t
                })
                .collect();
            InstanceSpec {
                name,
                n,
                m,
                k,
                omega,
                uncertainty: SpaceSpec::Grid {
                    lower: vec![-1.0; k],
                    upper: vec![1.0; k],
                    steps: vec![scenarios - 1; k],
                },
                objective: ObjectiveSpec::ObjectiveWise { blocks, terms },
            }
        }
    };
    UncertainInstance::new(spec)
}

fn index_space(len: usize) -> SpaceSpec {
    SpaceSpec::Explicit {
        points: (0..len).map(|i| vec![i as f64]).collect(),
    }
}

fn random_space(rng: &mut ChaCha8Rng, len: usize, dim: usize) -> SpaceSpec {
    SpaceSpec::Explicit {
        points: (0..len)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect(),
    }
}

/// Coefficients on `[-1, 1]`, with `Q` columns and `d` entries outside
/// `support` set to zero.
fn random_term(rng: &mut ChaCha8Rng, n: usize, k: usize, support: std::ops::Range<usize>) -> BilinearTerm {
    let mut coef = |on: bool| if on { rng.random_range(-1.0..=1.0) } else { 0.0 };
    let q = (0..n)
        .map(|_| (0..k).map(|j| coef(support.contains(&j))).collect())
        .collect();
    let c = (0..n).map(|_| coef(true)).collect();
    let d = (0..k).map(|j| coef(support.contains(&j))).collect();
    let e = coef(true);
    BilinearTerm { q, c, d, e }
}
