//! Named families: the four worked examples, the `Ĥₙ` series and ad-hoc
//! local-model points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bloch::BlochFamily;
use crate::fermi::{EdgeModel, ParamMap, SymbolSource};
use crate::linalg::{c, C64};
use crate::local_model::{h_loc, LocalModelParams};
use crate::manifold::Base;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub description: String,
    pub base: Option<Base>,
    pub edge: Option<ParamMap>,
    pub bulk: Option<BlochFamily>,
    pub local: Option<LocalModelParams>,
}

/// Catalog ids accepted by [`lookup`], with placeholders for parameters.
pub const CATALOG_IDS: &[&str] = &[
    "example1",
    "example2",
    "example3",
    "example3-broken",
    "example4",
    "hn:<n>",
    "hn-stab:<n>",
    "local:<a>,<reb>,<imb>,<rec>,<imc>",
];

pub fn lookup(id: &str) -> Result<CatalogEntry> {
    let id = id.trim();
    let entry = match id {
        "example1" => example1(),
        "example2" => example2(),
        "example3" => example3(false),
        "example3-broken" => example3(true),
        "example4" => example4(),
        _ => {
            if let Some(n) = id.strip_prefix("hn:") {
                hn_entry(parse_n(n)?, false)
            } else if let Some(n) = id.strip_prefix("hn-stab:") {
                hn_entry(parse_n(n)?, true)
            } else if let Some(rest) = id.strip_prefix("local:") {
                local_entry(rest)?
            } else {
                return Err(Error::InvalidArgument(format!(
                    "unknown family '{id}'; expected one of {}",
                    CATALOG_IDS.join(", ")
                )));
            }
        }
    };
    Ok(entry)
}

fn parse_n(s: &str) -> Result<u32> {
    let n: u32 = s
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("invalid winding '{s}'")))?;
    if n == 0 {
        return Err(Error::InvalidArgument("hn family requires n >= 1".into()));
    }
    Ok(n)
}

fn local_entry(rest: &str) -> Result<CatalogEntry> {
    let vals: Vec<f64> = rest
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("local parameters '{rest}': {e}")))?;
    if vals.len() != 5 || vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "local family needs five finite numbers a,reb,imb,rec,imc; got '{rest}'"
        )));
    }
    let p = LocalModelParams::new(vals[0], c(vals[1], vals[2]), c(vals[3], vals[4]));
    Ok(CatalogEntry {
        id: format!("local:{rest}"),
        description: "single point of the four-band local model".into(),
        base: None,
        edge: None,
        bulk: None,
        local: Some(p),
    })
}

/// Two-band chain `a = sin k`, `c = 3/2 + cos k` on `S¹`.
pub fn example1_map() -> ParamMap {
    ParamMap::new(
        "example1",
        Base::Torus(1),
        EdgeModel::Chain,
        |k: &[f64]| LocalModelParams::new(k[0].sin(), c(0.0, 0.0), c(1.5 + k[0].cos(), 0.0)),
    )
    .with_derivative(|k: &[f64]| vec![[k[0].cos(), 0.0, 0.0, -k[0].sin(), 0.0]])
    .with_window(2f64.sqrt())
}

fn example1() -> CatalogEntry {
    CatalogEntry {
        id: "example1".into(),
        description: "chain on S^1 with edge sign coordinate sin k and hopping ratio 3/2 + cos k"
            .into(),
        base: Some(Base::Torus(1)),
        edge: Some(example1_map()),
        bulk: None,
        local: None,
    }
}

/// `(a, b, c) = (x, y + iz, w − 1)` on `S³ ⊂ ℝ⁴`.
pub fn example2_map() -> ParamMap {
    ParamMap::new(
        "example2",
        Base::Sphere(3),
        EdgeModel::Odd,
        |x: &[f64]| LocalModelParams::new(x[0], c(x[1], x[2]), c(x[3] - 1.0, 0.0)),
    )
    .with_derivative(|_: &[f64]| {
        vec![
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, 0.0],
        ]
    })
    .with_window(3f64.sqrt())
}

fn example2() -> CatalogEntry {
    CatalogEntry {
        id: "example2".into(),
        description: "S^3 family a = x, b = y + iz, c = w - 1".into(),
        base: Some(Base::Sphere(3)),
        edge: Some(example2_map()),
        bulk: None,
        local: None,
    }
}

/// `b = y + iz`, `c = w − 1`, `a ≡ 0` on `S² ⊂ ℝ³`.
pub fn example4_map() -> ParamMap {
    ParamMap::new(
        "example4",
        Base::Sphere(2),
        EdgeModel::Even,
        |x: &[f64]| LocalModelParams::new(0.0, c(x[0], x[1]), c(x[2] - 1.0, 0.0)),
    )
    .with_derivative(|_: &[f64]| {
        vec![
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, 0.0],
        ]
    })
    .with_window(3f64.sqrt())
}

fn example4() -> CatalogEntry {
    CatalogEntry {
        id: "example4".into(),
        description: "graded S^2 family b = y + iz, c = w - 1, a = 0".into(),
        base: Some(Base::Sphere(2)),
        edge: Some(example4_map()),
        bulk: None,
        local: None,
    }
}

/// Parameters of `Ĥₙ` at `(k₁, k₂, k₃)`:
/// `a = −cos(k₂ + k₃)`, `b = −1 − e^{−ink₁} − e^{−ik₂}`, `c = −1 − e^{−ik₃}`.
pub fn hn_params(n: f64, k: &[f64]) -> LocalModelParams {
    LocalModelParams::new(
        -(k[1] + k[2]).cos(),
        c(
            -1.0 - (n * k[0]).cos() - k[1].cos(),
            (n * k[0]).sin() + k[1].sin(),
        ),
        c(-1.0 - k[2].cos(), k[2].sin()),
    )
}

fn hn_derivative(n: f64, k: &[f64]) -> Vec<[f64; 5]> {
    let s23 = (k[1] + k[2]).sin();
    vec![
        [0.0, n * (n * k[0]).sin(), n * (n * k[0]).cos(), 0.0, 0.0],
        [s23, k[1].sin(), k[1].cos(), 0.0, 0.0],
        [s23, 0.0, 0.0, k[2].sin(), k[2].cos()],
    ]
}

/// Edge family of `Ĥₙ` on `T³`; `n = 1` is the worked three-torus example.
pub fn hn_map(n: u32) -> ParamMap {
    let nf = n as f64;
    ParamMap::new(
        format!("hn:{n}"),
        Base::Torus(3),
        EdgeModel::Odd,
        move |k: &[f64]| hn_params(nf, k),
    )
    .with_derivative(move |k: &[f64]| hn_derivative(nf, k))
    .with_window(3f64.sqrt())
}

/// Bulk `Ĥₙ` on `T⁴`, edge direction `k₄`.
pub fn hn_bulk(n: u32) -> BlochFamily {
    let nf = n as f64;
    BlochFamily::new(format!("hn:{n}"), Base::Torus(4), 4, move |k: &[f64]| {
        h_loc(&hn_params(nf, k), k[3])
    })
    .with_edge(hn_map(n))
}

/// `Ĥₙ ⊕ diag(−1, 1)`.
pub fn hn_stabilized(n: u32) -> BlochFamily {
    let mut bulk = hn_bulk(n).direct_sum_constant(&[-1.0, 1.0]);
    bulk.id = format!("hn-stab:{n}");
    let mut edge = hn_map(n).with_symbol(SymbolSource::LocalPlusConstant(vec![-1.0, 1.0]));
    edge.id = bulk.id.clone();
    bulk.with_edge(edge)
}

fn hn_entry(n: u32, stabilized: bool) -> CatalogEntry {
    let bulk = if stabilized {
        hn_stabilized(n)
    } else {
        hn_bulk(n)
    };
    CatalogEntry {
        id: bulk.id.clone(),
        description: if stabilized {
            format!("H_{n} on T^4 plus a constant diag(-1, 1) block")
        } else {
            format!("class AI insulator H_{n} on T^4 with b winding {n} times in k1")
        },
        base: Some(Base::Torus(3)),
        edge: bulk.edge.as_deref().cloned(),
        bulk: Some(bulk),
        local: None,
    }
}

fn example3(broken: bool) -> CatalogEntry {
    let mut edge = hn_map(1);
    let mut bulk = hn_bulk(1);
    let (id, description) = if broken {
        let inner = edge.clone();
        edge = ParamMap::new(
            "example3-broken",
            Base::Torus(3),
            EdgeModel::Odd,
            move |k: &[f64]| {
                let mut p = inner.eval(k);
                p.b += c(0.0, 0.1);
                p
            },
        )
        .with_derivative(move |k: &[f64]| hn_derivative(1.0, k))
        .with_window(3f64.sqrt());
        let e = edge.clone();
        bulk = BlochFamily::new("example3-broken", Base::Torus(4), 4, move |k: &[f64]| {
            h_loc(&e.eval(k), k[3])
        })
        .with_edge(edge.clone());
        (
            "example3-broken",
            "three-torus example with b shifted by 0.1i (breaks the class AI symmetry)",
        )
    } else {
        edge.id = "example3".into();
        bulk.id = "example3".into();
        bulk = bulk.with_edge(edge.clone());
        (
            "example3",
            "three-torus family a = -cos(k2 + k3), b = -1 - e^{-ik1} - e^{-ik2}, c = -1 - e^{-ik3}",
        )
    };
    CatalogEntry {
        id: id.into(),
        description: description.into(),
        base: Some(Base::Torus(3)),
        edge: Some(edge),
        bulk: Some(bulk),
        local: None,
    }
}

/// One term `coeff · f(freq · k)` with `f` cosine or sine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub coeff: f64,
    pub freq: Vec<i32>,
    #[serde(default)]
    pub sin: bool,
}

/// Custom edge family on a torus whose parameters are real trigonometric
/// polynomials of degree at most 4 in each angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigFamily {
    pub id: String,
    pub dim: usize,
    pub model: EdgeModel,
    #[serde(default)]
    pub a: Vec<TrigTerm>,
    #[serde(default)]
    pub re_b: Vec<TrigTerm>,
    #[serde(default)]
    pub im_b: Vec<TrigTerm>,
    #[serde(default)]
    pub re_c: Vec<TrigTerm>,
    #[serde(default)]
    pub im_c: Vec<TrigTerm>,
    pub window: Option<f64>,
}

pub const TRIG_MAX_DEGREE: i32 = 4;

fn eval_terms(terms: &[TrigTerm], k: &[f64]) -> (f64, Vec<f64>) {
    let mut v = 0.0;
    let mut g = vec![0.0; k.len()];
    for t in terms {
        let phase: f64 = t.freq.iter().zip(k).map(|(&f, x)| f as f64 * x).sum();
        let (val, der) = if t.sin {
            (phase.sin(), phase.cos())
        } else {
            (phase.cos(), -phase.sin())
        };
        v += t.coeff * val;
        for (gj, &f) in g.iter_mut().zip(&t.freq) {
            *gj += t.coeff * der * f as f64;
        }
    }
    (v, g)
}

impl TrigFamily {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidArgument(format!(
                "custom family dimension {} not in 1..=3",
                self.dim
            )));
        }
        if self.model.count() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "model {:?} has {} sign coordinates but the torus has dimension {}",
                self.model,
                self.model.count(),
                self.dim
            )));
        }
        for t in self.tables().iter().flat_map(|t| t.iter()) {
            if t.freq.len() != self.dim {
                return Err(Error::InvalidArgument(format!(
                    "term frequency {:?} has wrong length",
                    t.freq
                )));
            }
            if t.freq.iter().any(|f| f.abs() > TRIG_MAX_DEGREE) {
                return Err(Error::InvalidArgument(format!(
                    "term frequency {:?} exceeds degree {TRIG_MAX_DEGREE}",
                    t.freq
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
        }
        if self.model == EdgeModel::Even && !self.a.is_empty() {
            return Err(Error::InvalidArgument("even families require a = 0".into()));
        }
        Ok(())
    }

    fn tables(&self) -> [&Vec<TrigTerm>; 5] {
        [&self.a, &self.re_b, &self.im_b, &self.re_c, &self.im_c]
    }

    pub fn to_param_map(&self) -> Result<ParamMap> {
        self.validate()?;
        let f1 = self.clone();
        let f2 = self.clone();
        let mut pm = ParamMap::new(
            self.id.clone(),
            Base::Torus(self.dim),
            self.model,
            move |k: &[f64]| {
                let v: Vec<f64> = f1.tables().iter().map(|t| eval_terms(t, k).0).collect();
                LocalModelParams::new(v[0], C64::new(v[1], v[2]), C64::new(v[3], v[4]))
            },
        )
        .with_derivative(move |k: &[f64]| {
            let grads: Vec<Vec<f64>> = f2.tables().iter().map(|t| eval_terms(t, k).1).collect();
            (0..k.len())
                .map(|j| {
                    [
                        grads[0][j],
                        grads[1][j],
                        grads[2][j],
                        grads[3][j],
                        grads[4][j],
                    ]
                })
                .collect()
        });
        if let Some(mu) = self.window {
            pm = pm.with_window(mu);
        }
        Ok(pm)
    }
}

/// Fermi set of `Ĥₙ` from the closed-form union over `l = 1..n`.
pub fn hn_fermi_set(n: u32) -> Vec<[f64; 3]> {
    let nf = n as f64;
    let mut pts = Vec::new();
    for l in 1..=n {
        let shift = 2.0 * (l - 1) as f64 * PI / nf;
        pts.push([
            2.0 * PI / (3.0 * nf) + shift,
            4.0 * PI / 3.0,
            7.0 * PI / 6.0,
        ]);
        pts.push([
            4.0 * PI / (3.0 * nf) + shift,
            2.0 * PI / 3.0,
            5.0 * PI / 6.0,
        ]);
    }
    pts
}
