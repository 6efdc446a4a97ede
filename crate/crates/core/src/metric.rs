//! Metric specifications: validation, evaluation as jets, and the built-in
//! corpus of witness metrics used by the verification suite.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{Expr, JetEnv};
use crate::jets::Jet;
use crate::parse::{parse_raw, RawMetric};
use crate::rng::SplitMix64;

/// A parsed, validated metric: dimension, coordinates, parameters, a
/// sampling box, and the symmetric component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    name: String,
    dim: usize,
    coords: Vec<String>,
    params: BTreeMap<String, f64>,
    /// Closed sampling interval per coordinate, in coordinate order.
    domain: Vec<(f64, f64)>,
    /// Component expressions keyed by `(i, j)` with `i <= j`; missing
    /// off-diagonal components are zero.
    components: BTreeMap<(usize, usize), Expr>,
}

impl MetricSpec {
    pub fn parse(text: &str) -> Result<MetricSpec> {
        let raw = parse_raw(text)?;
        MetricSpec::from_raw(raw)
    }

    fn from_raw(raw: RawMetric) -> Result<MetricSpec> {
        let dim = raw
            .dim
            .ok_or_else(|| Error::DimMismatch("missing `dim` directive".into()))?;
        if dim == 0 || dim > 6 {
            return Err(Error::DimMismatch(format!(
                "dim must be between 1 and 6, got {dim}"
            )));
        }
        let coords = raw
            .coords
            .ok_or_else(|| Error::DimMismatch("missing `coords` directive".into()))?;
        if coords.len() != dim {
            return Err(Error::DimMismatch(format!(
                "dim is {dim} but {} coordinates are declared",
                coords.len()
            )));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(Error::DimMismatch(format!("duplicate coordinate `{c}`")));
            }
        }

        let mut params = BTreeMap::new();
        for (name, value, line) in &raw.params {
            if coords.contains(name) {
                return Err(Error::UnknownIdentifier {
                    name: format!("{name} (parameter shadows a coordinate)"),
                    line: *line,
                    col: 1,
                });
            }
            params.insert(name.clone(), *value);
        }

        let mut domain = vec![None; dim];
        for (name, lo, hi, line) in &raw.domains {
            let idx = coords.iter().position(|c| c == name).ok_or_else(|| {
                Error::UnknownIdentifier {
                    name: name.clone(),
                    line: *line,
                    col: 1,
                }
            })?;
            if lo >= hi {
                return Err(Error::DimMismatch(format!(
                    "empty domain [{lo}, {hi}] for coordinate `{name}`"
                )));
            }
            domain[idx] = Some((*lo, *hi));
        }
        let domain: Vec<(f64, f64)> = domain
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.ok_or_else(|| Error::MissingDomain(coords[i].clone())))
            .collect::<Result<_>>()?;

        let mut components: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
        for (i, j, expr, line) in raw.components {
            if i >= dim || j >= dim {
                return Err(Error::DimMismatch(format!(
                    "component g {i} {j} out of range for dim {dim} (line {line})"
                )));
            }
            let key = (i.min(j), i.max(j));
            if let Some(existing) = components.get(&key) {
                if *existing != expr {
                    return Err(Error::InconsistentComponent { i: key.0, j: key.1 });
                }
            } else {
                components.insert(key, expr);
            }
        }

        // every identifier must resolve against coordinates or parameters
        for ((i, j), expr) in &components {
            let mut idents = Vec::new();
            expr.collect_idents(&mut idents);
            for name in idents {
                if !coords.iter().any(|c| c == name) && !params.contains_key(name) {
                    return Err(Error::UnknownIdentifier {
                        name: format!("{name} (in component g {i} {j})"),
                        line: 0,
                        col: 0,
                    });
                }
            }
        }

        Ok(MetricSpec {
            name: raw.name.unwrap_or_else(|| "metric".into()),
            dim,
            coords,
            params,
            domain,
            components,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Component expression at `(i, j)`, normalized by symmetry.
    pub fn component(&self, i: usize, j: usize) -> Option<&Expr> {
        self.components.get(&(i.min(j), i.max(j)))
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim
            && point
                .iter()
                .zip(&self.domain)
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// Evaluate the component matrix as jets of the given order at a point.
    /// The result is symmetric by construction (mirrored clones).
    pub fn eval(&self, point: &[f64], order: usize) -> Result<Vec<Vec<Jet>>> {
        if point.len() != self.dim {
            return Err(Error::DimMismatch(format!(
                "point has {} coordinates, metric has {}",
                point.len(),
                self.dim
            )));
        }
        if !self.contains(point) {
            return Err(Error::OutsideDomain(point.to_vec()));
        }
        let mut vars = BTreeMap::new();
        for (i, name) in self.coords.iter().enumerate() {
            vars.insert(name.clone(), Jet::variable(self.dim, order, i, point[i])?);
        }
        for (name, value) in &self.params {
            vars.insert(name.clone(), Jet::constant(self.dim, order, *value)?);
        }
        let env = JetEnv {
            vars: &vars,
            params: &self.params,
            dim: self.dim,
            order,
        };
        let zero = Jet::constant(self.dim, order, 0.0)?;
        let mut g = vec![vec![zero; self.dim]; self.dim];
        for ((i, j), expr) in &self.components {
            let jet = expr.eval_jet(&env)?;
            if i != j {
                g[*j][*i] = jet.clone();
            }
            g[*i][*j] = jet;
        }
        Ok(g)
    }

    /// Seeded uniform samples in the domain box, coordinates drawn in order.
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = SplitMix64::new(seed);
        (0..n)
            .map(|_| {
                self.domain
                    .iter()
                    .map(|(lo, hi)| rng.sample_in(*lo, *hi))
                    .collect()
            })
            .collect()
    }

    /// Serialize back to the line format; reparsing yields an equal spec.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name {}", self.name);
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "coords {}", self.coords.join(" "));
        for (name, value) in &self.params {
            let _ = writeln!(out, "param {name} {value}");
        }
        for (i, (lo, hi)) in self.domain.iter().enumerate() {
            let _ = writeln!(out, "domain {} {lo} {hi}", self.coords[i]);
        }
        for ((i, j), expr) in &self.components {
            let _ = writeln!(out, "g {i} {j} {expr}");
        }
        out
    }

    /// Load a metric from the built-in corpus.
    pub fn builtin(name: &str) -> Result<MetricSpec> {
        for (n, text) in CORPUS {
            if *n == name {
                return MetricSpec::parse(text);
            }
        }
        Err(Error::UnknownMetric {
            name: name.into(),
            available: builtin_names().join(", "),
        })
    }
}

/// Names of the built-in witness metrics, in corpus order.
pub fn builtin_names() -> Vec<&'static str> {
    CORPUS.iter().map(|(n, _)| *n).collect()
}

const CORPUS: &[(&str, &str)] = &[
    ("flat_r4", include_str!("../metrics/flat_r4.metric")),
    ("flat_minkowski", include_str!("../metrics/flat_minkowski.metric")),
    ("sphere_s2", include_str!("../metrics/sphere_s2.metric")),
    ("sphere_s3", include_str!("../metrics/sphere_s3.metric")),
    ("hyperbolic_h2", include_str!("../metrics/hyperbolic_h2.metric")),
    ("schwarzschild", include_str!("../metrics/schwarzschild.metric")),
    ("flrw_dust", include_str!("../metrics/flrw_dust.metric")),
    ("ppwave_sym", include_str!("../metrics/ppwave_sym.metric")),
    ("ppwave_rec", include_str!("../metrics/ppwave_rec.metric")),
    ("product_s2xr", include_str!("../metrics/product_s2xr.metric")),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_flat_2d() {
        let text = "dim 2\ncoords x y\ng 0 0 1\ng 1 1 1\ndomain x -1 1\ndomain y -1 1\n";
        let m = MetricSpec::parse(text).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.component(0, 1).is_none());
        assert!(m.component(1, 0).is_none());
        let g = m.eval(&[0.3, -0.4], 2).unwrap();
        assert_eq!(g[0][0].constant_term(), 1.0);
        assert_eq!(g[0][1].constant_term(), 0.0);
    }

    #[test]
    fn inconsistent_symmetric_pair() {
        let text = "dim 2\ncoords x r\ndomain x -1 1\ndomain r 1 2\ng 0 1 r\ng 1 0 r^2\n";
        assert!(matches!(
            MetricSpec::parse(text),
            Err(Error::InconsistentComponent { i: 0, j: 1 })
        ));
    }

    #[test]
    fn symmetric_pair_same_text_ok() {
        let text = "dim 2\ncoords x r\ndomain x -1 1\ndomain r 1 2\ng 0 1 r\ng 1 0 r\ng 0 0 1\ng 1 1 1\n";
        let m = MetricSpec::parse(text).unwrap();
        assert!(m.component(1, 0).is_some());
    }

    #[test]
    fn schwarzschild_fixture_loads() {
        let m = MetricSpec::builtin("schwarzschild").unwrap();
        assert_eq!(m.dim(), 4);
        assert_eq!(m.params().get("M"), Some(&1.0));
        for i in 0..4 {
            assert!(m.component(i, i).is_some());
        }
        assert!(m.component(0, 1).is_none());
    }

    #[test]
    fn unknown_builtin_lists_available() {
        let err = MetricSpec::builtin("nosuch").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nosuch"));
        assert!(msg.contains("sphere_s2"));
    }

    #[test]
    fn eval_constant_metric_is_constant_jets() {
        let m = MetricSpec::builtin("flat_r4").unwrap();
        let g = m.eval(&[0.1, 0.2, 0.3, 0.4], 2).unwrap();
        for (i, row) in g.iter().enumerate() {
            for (j, jet) in row.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(jet.constant_term(), expect);
                assert_eq!(jet.max_abs_coeff(), expect.abs());
            }
        }
    }

    #[test]
    fn eval_sphere_stationary_at_equator() {
        let m = MetricSpec::builtin("sphere_s2").unwrap();
        let g = m.eval(&[std::f64::consts::FRAC_PI_2, 1.0], 1).unwrap();
        assert!((g[1][1].constant_term() - 1.0).abs() < 1e-15);
        assert!(g[1][1].extract_partial(&[1, 0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn eval_schwarzschild_g00_partials() {
        // g_00 = -(1 - 2M/r) at r = 4, M = 1: value -0.5, d/dr = -2M/r^2 = -0.125
        let m = MetricSpec::builtin("schwarzschild").unwrap();
        let g = m.eval(&[0.5, 4.0, 1.2, 1.0], 1).unwrap();
        assert!((g[0][0].constant_term() + 0.5).abs() < 1e-15);
        assert!((g[0][0].extract_partial(&[0, 1, 0, 0]).unwrap() + 0.125).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_point_rejected() {
        let m = MetricSpec::builtin("schwarzschild").unwrap();
        assert!(matches!(
            m.eval(&[0.5, 2.5, 1.2, 1.0], 1),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn round_trip_corpus() {
        for name in builtin_names() {
            let m = MetricSpec::builtin(name).unwrap();
            let again = MetricSpec::parse(&m.to_text()).unwrap();
            assert_eq!(m, again, "round trip failed for {name}");
        }
    }

    #[test]
    fn sampling_is_seeded_and_in_domain() {
        let m = MetricSpec::builtin("schwarzschild").unwrap();
        let a = m.sample_points(10, 42);
        let b = m.sample_points(10, 42);
        assert_eq!(a, b);
        for p in &a {
            assert!(m.contains(p));
        }
        let c = m.sample_points(10, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn malformed_fixture_files() {
        // each malformed input maps to its documented error class
        let cases: Vec<(&str, fn(&Error) -> bool)> = vec![
            // syntax error inside an expression
            ("dim 1\ncoords x\ndomain x 0 1\ng 0 0 1+*2\n", |e| {
                matches!(e, Error::Syntax { .. })
            }),
            // unknown identifier in a component
            ("dim 1\ncoords x\ndomain x 0 1\ng 0 0 q\n", |e| {
                matches!(e, Error::UnknownIdentifier { .. })
            }),
            // dim / coords mismatch
            ("dim 3\ncoords x y\ndomain x 0 1\ndomain y 0 1\n", |e| {
                matches!(e, Error::DimMismatch(_))
            }),
            // inconsistent duplicate component
            (
                "dim 2\ncoords x r\ndomain x 0 1\ndomain r 1 2\ng 0 1 r\ng 1 0 r^2\n",
                |e| matches!(e, Error::InconsistentComponent { .. }),
            ),
            // missing domain
            ("dim 2\ncoords x y\ndomain x 0 1\ng 0 0 y\n", |e| {
                matches!(e, Error::MissingDomain(_))
            }),
            // component index out of range
            ("dim 2\ncoords x y\ndomain x 0 1\ndomain y 0 1\ng 0 5 1\n", |e| {
                matches!(e, Error::DimMismatch(_))
            }),
            // unknown directive
            ("dim 1\ncoords x\ndomain x 0 1\nfoo 1\n", |e| {
                matches!(e, Error::Syntax { .. })
            }),
            // missing dim entirely
            ("coords x\ndomain x 0 1\ng 0 0 1\n", |e| {
                matches!(e, Error::DimMismatch(_))
            }),
            // malformed number
            ("dim 1\ncoords x\ndomain x 0 1\ng 0 0 1..5\n", |e| {
                matches!(e, Error::Syntax { .. })
            }),
            // unknown function
            ("dim 1\ncoords x\ndomain x 0 1\ng 0 0 foo(x)\n", |e| {
                matches!(e, Error::UnknownIdentifier { .. })
            }),
        ];
        for (idx, (text, class)) in cases.iter().enumerate() {
            match MetricSpec::parse(text) {
                Err(e) => assert!(class(&e), "fixture {idx}: wrong error class: {e}"),
                Ok(_) => panic!("fixture {idx} unexpectedly parsed"),
            }
        }
    }

    #[test]
    fn expression_display_round_trip() {
        use crate::parse::parse_expr;
        for text in [
            "-(1-2*M/r)",
            "r^2*sin(th)^2",
            "t^(4/3)",
            "exp(u)*(x^2-y^2)",
            "1/y^2",
            "-x^2",
            "a-b+c",
            "a/(b*c)",
            "2^-2",
            "x^2^3",
        ] {
            let e = parse_expr(text).unwrap();
            let shown = e.to_string();
            let again = parse_expr(&shown).unwrap();
            assert_eq!(e, again, "display round trip failed: {text} -> {shown}");
        }
    }
}
