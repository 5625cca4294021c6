//! Flat `key = value` model specification files.
//!
//! One assignment per line; `#` starts a comment. Vectors are
//! space-separated numbers, matrices use `;` between rows, distribution
//! expressions look like `gamma(0.3, 13.9)` and may nest, and lists of
//! distributions are separated by `;` (a single entry broadcasts to all k
//! columns).
//!
//! ```text
//! # three-block model
//! n = 2000
//! k = 3
//! rho = 0.0167
//! pi = 0.3333 0.3333 0.3334
//! b = 1 0.15 0.15 ; 0.15 1 0.15 ; 0.15 0.15 1
//! theta_dist = uniform(0.5, 1.5)
//! ```

use std::collections::BTreeMap;

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::models::dist::DistributionSpec;
use crate::models::factor::{FactorModelSpec, NoiseFamily};
use crate::models::lda::LdaSpec;
use crate::models::sbm::{DcSbmSpec, MixedMembershipSpec, OverlapSpec};

/// Which generator a specification file feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Factor,
    Sbm,
    Dcsbm,
    Overlap,
    Mixed,
    Lda,
}

impl ModelKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "factor" => Ok(ModelKind::Factor),
            "sbm" => Ok(ModelKind::Sbm),
            "dcsbm" => Ok(ModelKind::Dcsbm),
            "overlap" => Ok(ModelKind::Overlap),
            "mixed" => Ok(ModelKind::Mixed),
            "lda" => Ok(ModelKind::Lda),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Factor => "factor",
            ModelKind::Sbm => "sbm",
            ModelKind::Dcsbm => "dcsbm",
            ModelKind::Overlap => "overlap",
            ModelKind::Mixed => "mixed",
            ModelKind::Lda => "lda",
        }
    }
}

/// A parsed, validated model specification.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Factor(FactorModelSpec),
    Dcsbm(DcSbmSpec),
    Overlap(OverlapSpec),
    Mixed(MixedMembershipSpec),
    Lda(LdaSpec),
}

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let lno = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lno,
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim().to_string();
            if map.contains_key(&key) {
                return Err(Error::Parse {
                    line: lno,
                    msg: format!("duplicate key `{key}`"),
                });
            }
            map.insert(key, (lno, value.trim().to_string()));
        }
        Ok(Fields { map })
    }

    fn take(&mut self, key: &str) -> Result<(usize, String)> {
        self.map.remove(key).ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("missing required key `{key}`"),
        })
    }

    fn take_opt(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn finish(self) -> Result<()> {
        if let Some((key, (lno, _))) = self.map.into_iter().next() {
            return Err(Error::Parse {
                line: lno,
                msg: format!("unknown key `{key}`"),
            });
        }
        Ok(())
    }

    fn usize(&mut self, key: &str) -> Result<usize> {
        let (lno, v) = self.take(key)?;
        v.parse().map_err(|_| Error::Parse {
            line: lno,
            msg: format!("`{key}` must be a nonnegative integer, got `{v}`"),
        })
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        let (lno, v) = self.take(key)?;
        v.parse().map_err(|_| Error::Parse {
            line: lno,
            msg: format!("`{key}` must be a number, got `{v}`"),
        })
    }

    fn vector(&mut self, key: &str) -> Result<Vec<f64>> {
        let (lno, v) = self.take(key)?;
        parse_vector(&v).map_err(|msg| Error::Parse { line: lno, msg })
    }

    fn matrix(&mut self, key: &str) -> Result<Mat> {
        let (lno, v) = self.take(key)?;
        let rows: std::result::Result<Vec<Vec<f64>>, String> =
            v.split(';').map(parse_vector).collect();
        let rows = rows.map_err(|msg| Error::Parse { line: lno, msg })?;
        Mat::from_rows(rows).map_err(|e| Error::Parse {
            line: lno,
            msg: e.to_string(),
        })
    }

    fn dist_list(&mut self, key: &str, k: usize) -> Result<Vec<DistributionSpec>> {
        let (lno, v) = self.take(key)?;
        let items: Result<Vec<DistributionSpec>> = v
            .split(';')
            .map(|s| parse_distribution(s.trim()).map_err(|msg| Error::Parse { line: lno, msg }))
            .collect();
        let items = items?;
        if items.len() == 1 {
            Ok(vec![items[0].clone(); k])
        } else if items.len() == k {
            Ok(items)
        } else {
            Err(Error::Parse {
                line: lno,
                msg: format!("`{key}` needs 1 or {k} distributions, got {}", items.len()),
            })
        }
    }

    fn dist(&mut self, key: &str) -> Result<DistributionSpec> {
        let (lno, v) = self.take(key)?;
        parse_distribution(v.trim()).map_err(|msg| Error::Parse { line: lno, msg })
    }
}

fn parse_vector(s: &str) -> std::result::Result<Vec<f64>, String> {
    let vals: std::result::Result<Vec<f64>, _> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number `{t}`")))
        .collect();
    let vals = vals?;
    if vals.is_empty() {
        return Err("empty vector".into());
    }
    Ok(vals)
}

/// Splits `a, b, c` at the top nesting level only.
fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Parses a distribution expression such as `gamma(0.3, 13.9)` or
/// `scaled_bernoulli(0.1, uniform(0, 1))`.
pub fn parse_distribution(s: &str) -> std::result::Result<DistributionSpec, String> {
    let open = s
        .find('(')
        .ok_or_else(|| format!("expected `name(args)` in `{s}`"))?;
    if !s.ends_with(')') {
        return Err(format!("unbalanced parentheses in `{s}`"));
    }
    let name = s[..open].trim().to_lowercase();
    let args = split_args(&s[open + 1..s.len() - 1]);
    let num = |i: usize| -> std::result::Result<f64, String> {
        args.get(i)
            .ok_or_else(|| format!("`{name}` missing argument {i}"))?
            .parse::<f64>()
            .map_err(|_| format!("`{name}` argument {i} is not a number"))
    };
    let want = |n: usize| -> std::result::Result<(), String> {
        if args.len() != n {
            Err(format!("`{name}` takes {n} arguments, got {}", args.len()))
        } else {
            Ok(())
        }
    };
    let built = match name.as_str() {
        "point" | "point_mass" => {
            want(1)?;
            DistributionSpec::point_mass(num(0)?)
        }
        "bernoulli" => {
            want(1)?;
            DistributionSpec::bernoulli(num(0)?)
        }
        "scaled_bernoulli" => {
            want(2)?;
            let mag = parse_distribution(&args[1])?;
            DistributionSpec::scaled_bernoulli(num(0)?, mag)
        }
        "exponential" => {
            want(1)?;
            DistributionSpec::exponential(num(0)?)
        }
        "gamma" => {
            want(2)?;
            DistributionSpec::gamma(num(0)?, num(1)?)
        }
        "uniform" => {
            want(2)?;
            DistributionSpec::uniform(num(0)?, num(1)?)
        }
        "shifted" => {
            want(2)?;
            let base = parse_distribution(&args[0])?;
            DistributionSpec::shifted(base, num(1)?)
        }
        "dirichlet" => {
            let alpha: std::result::Result<Vec<f64>, String> = (0..args.len()).map(num).collect();
            DistributionSpec::dirichlet(alpha?)
        }
        other => return Err(format!("unknown distribution `{other}`")),
    };
    built.map_err(|e| e.to_string())
}

fn parse_noise(s: &str) -> std::result::Result<NoiseFamily, String> {
    let t = s.trim().to_lowercase();
    if t == "poisson" {
        return Ok(NoiseFamily::Poisson);
    }
    if t == "bernoulli" {
        return Ok(NoiseFamily::Bernoulli);
    }
    if let Some(rest) = t.strip_prefix("gaussian(") {
        let inner = rest.strip_suffix(')').ok_or("unbalanced parentheses")?;
        let sigma: f64 = inner.trim().parse().map_err(|_| "bad gaussian sigma")?;
        if sigma < 0.0 {
            return Err("gaussian sigma must be nonnegative".into());
        }
        return Ok(NoiseFamily::Gaussian { sigma });
    }
    Err(format!("unknown noise family `{s}`"))
}

/// Parses and validates a model specification of the given kind.
pub fn parse_model_spec(kind: ModelKind, text: &str) -> Result<ModelSpec> {
    let mut f = Fields::parse(text)?;
    let spec = match kind {
        ModelKind::Factor => {
            let n = f.usize("n")?;
            let d = f.usize("d")?;
            let k = f.usize("k")?;
            let rho = f.f64("rho")?;
            let b = f.matrix("b")?;
            let z_dists = f.dist_list("z_dist", k)?;
            let y_dists = f.dist_list("y_dist", k)?;
            let (lno, noise_str) = f.take("noise")?;
            let noise = parse_noise(&noise_str).map_err(|msg| Error::Parse { line: lno, msg })?;
            let spec = FactorModelSpec {
                n,
                d,
                k,
                b,
                z_dists,
                y_dists,
                noise,
                rho,
            };
            spec.validate()?;
            ModelSpec::Factor(spec)
        }
        ModelKind::Sbm | ModelKind::Dcsbm => {
            let n = f.usize("n")?;
            let k = f.usize("k")?;
            let rho = f.f64("rho")?;
            let pi = f.vector("pi")?;
            let b = f.matrix("b")?;
            let theta_dist = if kind == ModelKind::Dcsbm {
                f.dist("theta_dist")?
            } else {
                DistributionSpec::point_mass(1.0)?
            };
            let spec = DcSbmSpec {
                n,
                k,
                pi,
                b,
                rho,
                theta_dist,
            };
            spec.validate()?;
            ModelSpec::Dcsbm(spec)
        }
        ModelKind::Overlap => {
            let spec = OverlapSpec {
                n: f.usize("n")?,
                k: f.usize("k")?,
                rho: f.f64("rho")?,
                p: f.vector("p")?,
                b: f.matrix("b")?,
            };
            ModelSpec::Overlap(spec)
        }
        ModelKind::Mixed => {
            let spec = MixedMembershipSpec {
                n: f.usize("n")?,
                k: f.usize("k")?,
                rho: f.f64("rho")?,
                alpha: f.vector("alpha")?,
                b: f.matrix("b")?,
            };
            ModelSpec::Mixed(spec)
        }
        ModelKind::Lda => {
            let n = f.usize("n")?;
            let d = f.usize("d")?;
            let k = f.usize("k")?;
            let alpha = f.vector("alpha")?;
            let s = f.f64("s")?;
            let beta = match (f.take_opt("beta"), f.take_opt("beta_file")) {
                (Some((lno, expr)), None) => {
                    parse_beta_expr(&expr, d, k).map_err(|msg| Error::Parse { line: lno, msg })?
                }
                (None, Some((_, path))) => crate::io::read_csv_matrix(&path)?,
                (Some(_), Some((lno, _))) => {
                    return Err(Error::Parse {
                        line: lno,
                        msg: "give either `beta` or `beta_file`, not both".into(),
                    })
                }
                (None, None) => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: "missing required key `beta` (or `beta_file`)".into(),
                    })
                }
            };
            ModelSpec::Lda(LdaSpec::new(n, d, k, alpha, s, beta)?)
        }
    };
    f.finish()?;
    Ok(spec)
}

fn parse_beta_expr(expr: &str, d: usize, k: usize) -> std::result::Result<Mat, String> {
    let t = expr.trim();
    if let Some(rest) = t.strip_prefix("blocks(") {
        let inner = rest.strip_suffix(')').ok_or("unbalanced parentheses")?;
        let args = split_args(inner);
        let width: usize = args
            .first()
            .ok_or("blocks(width[, weight]) needs a width")?
            .parse()
            .map_err(|_| "bad block width")?;
        let weight: f64 = match args.get(1) {
            Some(w) => w.parse().map_err(|_| "bad block weight")?,
            None => 1.0,
        };
        return LdaSpec::block_topics(d, k, width, weight).map_err(|e| e.to_string());
    }
    Err(format!(
        "unknown beta constructor `{t}` (expected blocks(width[, weight]))"
    ))
}
