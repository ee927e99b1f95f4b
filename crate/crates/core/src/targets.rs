//! Attack targets with known keys: planted random polynomials and a small
//! keyed toy cipher, both regenerable from a one-line description.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::attack::{KeyedBlackBox, SplitPoly};
use crate::blackbox::EvalError;
use crate::field::{Field, FieldElement};
use crate::linalg::invert;
use crate::poly::{parse_element, Monomial, MultiPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TargetError {
    #[error("no public variables to build a cube from")]
    NoPublic,
    #[error("infeasible profile: {0}")]
    Infeasible(String),
    #[error("target description: {0}")]
    Syntax(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    /// Total degree `d >= 2` of the planted polynomial.
    pub degree: u64,
    /// Extra random terms of total degree at most `d`.
    pub noise_terms: usize,
    /// Public term of multiplicity `d - 1` that must be planted first.
    pub cube: Option<Monomial>,
}

impl DegreeProfile {
    pub fn new(degree: u64, noise_terms: usize) -> Self {
        DegreeProfile {
            degree,
            noise_terms,
            cube: None,
        }
    }
}

/// A random polynomial `f(v, x)` with `n_sec` planted maxterms: it contains
/// `t_j * l_j(x)` for distinct public terms `t_j` of multiplicity `d - 1` and
/// linear forms `l_j` whose coefficient matrix is invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedTarget {
    split: SplitPoly,
    key: Vec<FieldElement>,
    planted: Vec<Monomial>,
}

impl PlantedTarget {
    pub fn poly(&self) -> &MultiPoly {
        self.split.poly()
    }

    pub fn key(&self) -> &[FieldElement] {
        &self.key
    }

    /// The planted public terms, first the forced one if any.
    pub fn planted_terms(&self) -> &[Monomial] {
        &self.planted
    }
}

impl KeyedBlackBox for PlantedTarget {
    fn field(&self) -> &Field {
        self.split.field()
    }
    fn n_pub(&self) -> usize {
        self.split.n_pub()
    }
    fn n_sec(&self) -> usize {
        self.split.n_sec()
    }
    fn eval(
        &self,
        public: &[FieldElement],
        secret: &[FieldElement],
    ) -> Result<FieldElement, EvalError> {
        self.split.eval(public, secret)
    }
}

/// Public exponent vectors with entries `<= cap` summing to `total`.
fn public_terms(n: usize, total: u64, cap: u64) -> Vec<Vec<u64>> {
    fn rec(i: usize, n: usize, left: u64, cap: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=cap.min(left) {
            cur.push(e);
            rec(i + 1, n, left - e, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, total, cap, &mut Vec::new(), &mut out);
    out
}

pub fn make_planted(
    field: &Field,
    n_pub: usize,
    n_sec: usize,
    profile: &DegreeProfile,
    seed: u64,
) -> Result<PlantedTarget, TargetError> {
    if n_pub == 0 {
        return Err(TargetError::NoPublic);
    }
    let d = profile.degree;
    if d < 2 {
        return Err(TargetError::Infeasible("degree must be at least 2".into()));
    }
    let cap = field.order() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = public_terms(n_pub, d - 1, cap);
    pool.shuffle(&mut rng);
    if let Some(cube) = &profile.cube {
        let e = cube.exponents();
        if e.len() != n_pub || cube.degree() != d - 1 || e.iter().any(|&x| x > cap) {
            return Err(TargetError::Infeasible(format!(
                "cube {} must be a public term of multiplicity {} with exponents <= {cap}",
                cube.to_text(),
                d - 1
            )));
        }
        pool.retain(|t| t != e);
        pool.insert(0, e.to_vec());
    }
    if pool.len() < n_sec {
        return Err(TargetError::Infeasible(format!(
            "only {} public terms of multiplicity {} with exponents <= {cap}, need {n_sec}",
            pool.len(),
            d - 1
        )));
    }
    let matrix = loop {
        let m: Vec<Vec<FieldElement>> = (0..n_sec)
            .map(|_| (0..n_sec).map(|_| field.random(&mut rng)).collect())
            .collect();
        if invert(field, &m).is_some() {
            break m;
        }
    };
    let n = n_pub + n_sec;
    let planted: Vec<Monomial> = pool.into_iter().take(n_sec).map(Monomial::new).collect();
    let mut terms = Vec::new();
    for (t, row) in planted.iter().zip(&matrix) {
        for (i, &c) in row.iter().enumerate() {
            let mut e = t.exponents().to_vec();
            e.resize(n, 0);
            e[n_pub + i] = 1;
            terms.push((Monomial::new(e), c));
        }
    }
    let noise = MultiPoly::random_with(field, n, d, profile.noise_terms, &mut rng);
    let poly = MultiPoly::from_terms(field, n, terms)
        .add(&noise)
        .expect("same field and arity");
    let key = (0..n_sec).map(|_| field.random(&mut rng)).collect();
    Ok(PlantedTarget {
        split: SplitPoly::new(poly, n_pub),
        key,
        planted,
    })
}

/// Toy keyed permutation-like map on `width` field elements. Each round:
/// `s <- L s + k + c_r` with `L` the lower-triangular all-ones matrix, then
/// `s_i <- s_i + s_{i+1}^2` (indices mod `width`). After the rounds the
/// key is added once more and the state summed. Public inputs are the initial
/// state, the secret inputs the key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyCipher {
    field: Field,
    width: usize,
    rounds: usize,
}

impl ToyCipher {
    pub fn new(field: &Field, width: usize, rounds: usize) -> Self {
        assert!(width > 0, "width must be positive");
        ToyCipher {
            field: field.clone(),
            width,
            rounds,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn compute(&self, public: &[FieldElement], key: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        let w = self.width;
        let mut s = public.to_vec();
        let mut next = vec![f.zero(); w];
        for r in 0..self.rounds {
            let mut acc = f.zero();
            for i in 0..w {
                acc = f.add(acc, s[i]);
                let c = f.from_u64((r * w + i + 1) as u64);
                next[i] = f.add(f.add(acc, key[i]), c);
            }
            for i in 0..w {
                let t = next[(i + 1) % w];
                s[i] = f.add(next[i], f.mul(t, t));
            }
        }
        f.sum(s.iter().zip(key).map(|(&x, &k)| f.add(x, k)))
    }
}

impl KeyedBlackBox for ToyCipher {
    fn field(&self) -> &Field {
        &self.field
    }
    fn n_pub(&self) -> usize {
        self.width
    }
    fn n_sec(&self) -> usize {
        self.width
    }
    fn eval(
        &self,
        public: &[FieldElement],
        secret: &[FieldElement],
    ) -> Result<FieldElement, EvalError> {
        if public.len() != self.width || secret.len() != self.width {
            return Err(EvalError(format!(
                "toy cipher takes {0} public and {0} secret inputs, got {1} and {2}",
                self.width,
                public.len(),
                secret.len()
            )));
        }
        Ok(self.compute(public, secret))
    }
}

/// One-line description from which a target is rebuilt exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSpec {
    Planted {
        field: Field,
        n_pub: usize,
        n_sec: usize,
        profile: DegreeProfile,
        seed: u64,
        key: Option<Vec<FieldElement>>,
    },
    Toy {
        field: Field,
        width: usize,
        rounds: usize,
        seed: u64,
        key: Option<Vec<FieldElement>>,
    },
}

/// A built target.
pub enum Target {
    Planted(PlantedTarget),
    Toy(ToyCipher),
}

impl KeyedBlackBox for Target {
    fn field(&self) -> &Field {
        match self {
            Target::Planted(t) => t.field(),
            Target::Toy(t) => t.field(),
        }
    }
    fn n_pub(&self) -> usize {
        match self {
            Target::Planted(t) => t.n_pub(),
            Target::Toy(t) => t.n_pub(),
        }
    }
    fn n_sec(&self) -> usize {
        match self {
            Target::Planted(t) => t.n_sec(),
            Target::Toy(t) => t.n_sec(),
        }
    }
    fn eval(
        &self,
        public: &[FieldElement],
        secret: &[FieldElement],
    ) -> Result<FieldElement, EvalError> {
        match self {
            Target::Planted(t) => t.eval(public, secret),
            Target::Toy(t) => t.eval(public, secret),
        }
    }
}

impl TargetSpec {
    pub fn field(&self) -> &Field {
        match self {
            TargetSpec::Planted { field, .. } | TargetSpec::Toy { field, .. } => field,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            TargetSpec::Planted { seed, .. } | TargetSpec::Toy { seed, .. } => *seed,
        }
    }

    fn explicit_key(&self) -> Option<&[FieldElement]> {
        match self {
            TargetSpec::Planted { key, .. } | TargetSpec::Toy { key, .. } => key.as_deref(),
        }
    }

    /// Builds the target and its key: the explicit one if given, otherwise
    /// the one drawn from the seed.
    pub fn build(&self) -> Result<(Target, Vec<FieldElement>), TargetError> {
        let (target, derived) = match self {
            TargetSpec::Planted {
                field,
                n_pub,
                n_sec,
                profile,
                seed,
                ..
            } => {
                let t = make_planted(field, *n_pub, *n_sec, profile, *seed)?;
                let key = t.key().to_vec();
                (Target::Planted(t), key)
            }
            TargetSpec::Toy {
                field,
                width,
                rounds,
                seed,
                ..
            } => {
                if *width == 0 {
                    return Err(TargetError::Infeasible(
                        "toy cipher width must be positive".into(),
                    ));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let key = (0..*width).map(|_| field.random(&mut rng)).collect();
                (Target::Toy(ToyCipher::new(field, *width, *rounds)), key)
            }
        };
        let key = match self.explicit_key() {
            Some(k) if k.len() != derived.len() => {
                return Err(TargetError::Syntax(format!(
                    "key has {} entries, expected {}",
                    k.len(),
                    derived.len()
                )))
            }
            Some(k) => k.to_vec(),
            None => derived,
        };
        Ok((target, key))
    }

    pub fn parse(text: &str) -> Result<Self, TargetError> {
        let bad = |m: String| TargetError::Syntax(m);
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| bad("no description line".into()))?;
        let pairs: Vec<(&str, &str)> = line
            .split_whitespace()
            .map(|tok| {
                tok.split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, found `{tok}`")))
            })
            .collect::<Result<_, _>>()?;
        let get = |k: &str| pairs.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
        let need = |k: &str| get(k).ok_or_else(|| bad(format!("missing `{k}`")));
        let num = |k: &str| -> Result<u64, TargetError> {
            need(k)?
                .parse()
                .map_err(|_| bad(format!("`{k}` is not a number")))
        };
        let field: Field = need("field")?.parse().map_err(|e| bad(format!("{e}")))?;
        let key = match get("key") {
            None => None,
            Some("") => Some(Vec::new()),
            Some(text) => Some(
                text.split(',')
                    .map(|s| {
                        parse_element(&field, &format!("({s})")).map_err(|e| bad(e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let seed = num("seed")?;
        match need("kind")? {
            "planted" => {
                let n_pub = num("n_pub")? as usize;
                let cube = match get("cube") {
                    None => None,
                    Some(t) => Some(
                        Monomial::parse(&field, n_pub, t).map_err(|e| bad(format!("cube: {e}")))?,
                    ),
                };
                let profile = DegreeProfile {
                    degree: num("degree")?,
                    noise_terms: num("noise_terms")? as usize,
                    cube,
                };
                Ok(TargetSpec::Planted {
                    field,
                    n_pub,
                    n_sec: num("n_sec")? as usize,
                    profile,
                    seed,
                    key,
                })
            }
            "toy" => Ok(TargetSpec::Toy {
                field,
                width: num("width")? as usize,
                rounds: num("rounds")? as usize,
                seed,
                key,
            }),
            other => Err(bad(format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::Planted {
                field,
                n_pub,
                n_sec,
                profile,
                seed,
                ..
            } => {
                write!(
                    f,
                    "kind=planted field={field} n_pub={n_pub} n_sec={n_sec} degree={} noise_terms={} seed={seed}",
                    profile.degree, profile.noise_terms
                )?;
                if let Some(c) = &profile.cube {
                    write!(f, " cube={}", c.to_text())?;
                }
            }
            TargetSpec::Toy {
                field,
                width,
                rounds,
                seed,
                ..
            } => {
                write!(
                    f,
                    "kind=toy field={field} width={width} rounds={rounds} seed={seed}"
                )?;
            }
        }
        if let Some(key) = self.explicit_key() {
            let field = self.field();
            let parts: Vec<String> = key.iter().map(|&k| field.format_element(k)).collect();
            write!(f, " key={}", parts.join(","))?;
        }
        Ok(())
    }
}
