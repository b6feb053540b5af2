//! Formal patterns over variables: the sum-product pattern, the catalog
//! patterns, instantiation, and monochromaticity checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::coloring::{ColorId, Coloring};
use crate::error::{Error, PatternError};

/// Expression tree over variable indices. There are no division nodes;
/// reciprocals appear only as `Inv` leaves of variables the pattern
/// declares invertible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Term {
    Var(usize),
    /// Exact reciprocal of an invertible variable.
    Inv(usize),
    Const(Rational),
    /// A variable raised to a positive power.
    Pow(usize, u32),
    Sum(Vec<(Rational, Term)>),
    Product(Vec<Term>),
}

/// Laurent monomial exponents, indexed by variable.
type Monomial = Vec<i32>;

/// Canonical normal form: monomial -> nonzero coefficient.
pub type NormalForm = BTreeMap<Monomial, Rational>;

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    /// Sum with unit coefficients.
    pub fn sum(children: impl IntoIterator<Item = Term>) -> Term {
        Term::Sum(children.into_iter().map(|t| (Rational::one(), t)).collect())
    }

    pub fn product(children: impl IntoIterator<Item = Term>) -> Term {
        Term::Product(children.into_iter().collect())
    }

    pub fn scaled(c: impl Into<Rational>, t: Term) -> Term {
        Term::Sum(vec![(c.into(), t)])
    }

    /// Evaluate at an assignment; `recips[i]` must hold `1/vals[i]` for
    /// every invertible variable referenced.
    pub fn eval(&self, vals: &[Rational], recips: &[Option<Rational>]) -> Rational {
        match self {
            Term::Var(i) => vals[*i].clone(),
            Term::Inv(i) => recips[*i].clone().expect("reciprocal prepared for invertible var"),
            Term::Const(c) => c.clone(),
            Term::Pow(i, e) => vals[*i].pow(*e as i32).expect("positive exponent"),
            Term::Sum(children) => children.iter().fold(Rational::zero(), |acc, (c, t)| {
                let v = t.eval(vals, recips);
                if c == &Rational::one() {
                    acc + v
                } else {
                    acc + &(c * &v)
                }
            }),
            Term::Product(children) => children
                .iter()
                .fold(Rational::one(), |acc, t| acc * t.eval(vals, recips)),
        }
    }

    pub fn normalize(&self, arity: usize) -> NormalForm {
        let mut out = NormalForm::new();
        let unit = |i: usize, e: i32| {
            let mut m = vec![0; arity];
            m[i] = e;
            m
        };
        match self {
            Term::Var(i) => {
                out.insert(unit(*i, 1), Rational::one());
            }
            Term::Inv(i) => {
                out.insert(unit(*i, -1), Rational::one());
            }
            Term::Pow(i, e) => {
                out.insert(unit(*i, *e as i32), Rational::one());
            }
            Term::Const(c) => {
                if !c.is_zero() {
                    out.insert(vec![0; arity], c.clone());
                }
            }
            Term::Sum(children) => {
                for (c, t) in children {
                    for (m, k) in t.normalize(arity) {
                        add_into(&mut out, m, c * &k);
                    }
                }
            }
            Term::Product(children) => {
                out.insert(vec![0; arity], Rational::one());
                for t in children {
                    let rhs = t.normalize(arity);
                    let mut next = NormalForm::new();
                    for (m1, c1) in &out {
                        for (m2, c2) in &rhs {
                            let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                            add_into(&mut next, m, c1 * c2);
                        }
                    }
                    out = next;
                }
            }
        }
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Sum(children) => children.iter().for_each(|(_, t)| t.walk(f)),
            Term::Product(children) => children.iter().for_each(|t| t.walk(f)),
            _ => {}
        }
    }

    fn render(&self, names: &[String]) -> String {
        match self {
            Term::Var(i) => names[*i].clone(),
            Term::Inv(i) => format!("1/{}", names[*i]),
            Term::Const(c) => c.to_string(),
            Term::Pow(i, e) => format!("{}^{}", names[*i], e),
            Term::Sum(children) => children
                .iter()
                .map(|(c, t)| {
                    let inner = t.render(names);
                    let inner = if matches!(t, Term::Sum(_)) {
                        format!("({inner})")
                    } else {
                        inner
                    };
                    if c == &Rational::one() {
                        inner
                    } else {
                        format!("{c}*{inner}")
                    }
                })
                .collect::<Vec<_>>()
                .join("+"),
            Term::Product(children) => children
                .iter()
                .map(|t| match t {
                    Term::Sum(_) => format!("({})", t.render(names)),
                    _ => t.render(names),
                })
                .collect::<Vec<_>>()
                .join("*"),
        }
    }
}

fn add_into(map: &mut NormalForm, m: Monomial, c: Rational) {
    let v = map.remove(&m).unwrap_or_else(Rational::zero) + c;
    if !v.is_zero() {
        map.insert(m, v);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraints {
    pub nonzero: bool,
    pub positive: bool,
    pub distinct: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    name: String,
    var_names: Vec<String>,
    invertible: Vec<bool>,
    terms: Vec<Term>,
    constraints: Constraints,
}

impl Pattern {
    /// Build a pattern, dropping terms whose normal form repeats an earlier
    /// term's.
    pub fn new(
        name: impl Into<String>,
        var_names: &[&str],
        invertible: &[usize],
        terms: Vec<Term>,
        constraints: Constraints,
    ) -> Result<Pattern, PatternError> {
        let name = name.into();
        let arity = var_names.len();
        if terms.is_empty() {
            return Err(PatternError::Invalid(format!("{name}: no terms")));
        }
        let mut inv = vec![false; arity];
        for &i in invertible {
            if i >= arity {
                return Err(PatternError::Invalid(format!("{name}: bad invertible var {i}")));
            }
            inv[i] = true;
        }
        let mut problem = None;
        for t in &terms {
            t.walk(&mut |node| match node {
                Term::Var(i) | Term::Pow(i, _) if *i >= arity => {
                    problem = Some(format!("variable index {i} out of range"))
                }
                Term::Inv(i) if *i >= arity || !inv[*i] => {
                    problem = Some(format!("reciprocal of non-invertible variable {i}"))
                }
                Term::Pow(_, 0) => problem = Some("zero exponent".into()),
                _ => {}
            });
        }
        if let Some(p) = problem {
            return Err(PatternError::Invalid(format!("{name}: {p}")));
        }
        let mut seen: Vec<NormalForm> = Vec::new();
        let mut kept = Vec::new();
        for t in terms {
            let nf = t.normalize(arity);
            if !seen.contains(&nf) {
                seen.push(nf);
                kept.push(t);
            }
        }
        Ok(Pattern {
            name,
            var_names: var_names.iter().map(|s| s.to_string()).collect(),
            invertible: inv,
            terms: kept,
            constraints,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.var_names.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn constraints(&self) -> Constraints {
        self.constraints
    }

    pub fn with_distinct(mut self, distinct: bool) -> Pattern {
        self.constraints.distinct = distinct;
        self
    }

    pub fn describe_term(&self, i: usize) -> String {
        self.terms[i].render(&self.var_names)
    }

    fn all_nodes(&self, mut f: impl FnMut(&Term)) {
        for t in &self.terms {
            t.walk(&mut f);
        }
    }

    /// True when every term maps integer assignments to integers.
    pub fn is_integer_valued(&self) -> bool {
        let mut ok = true;
        self.all_nodes(|t| match t {
            Term::Inv(_) => ok = false,
            Term::Const(c) if !c.is_integer() => ok = false,
            Term::Sum(ch) if ch.iter().any(|(c, _)| !c.is_integer()) => ok = false,
            _ => {}
        });
        ok
    }

    /// True when every term is nondecreasing in each variable over the
    /// positive reals (no reciprocals, no negative coefficients).
    pub fn is_monotone(&self) -> bool {
        let mut ok = true;
        self.all_nodes(|t| match t {
            Term::Inv(_) => ok = false,
            Term::Const(c) if c.is_negative() => ok = false,
            Term::Sum(ch) if ch.iter().any(|(c, _)| c.is_negative()) => ok = false,
            _ => {}
        });
        ok
    }

    pub fn check_assignment(&self, assignment: &[Rational]) -> Result<(), PatternError> {
        if assignment.len() != self.arity() {
            return Err(PatternError::Arity {
                pattern: self.name.clone(),
                expected: self.arity(),
                found: assignment.len(),
            });
        }
        for (i, v) in assignment.iter().enumerate() {
            if (self.constraints.nonzero || self.invertible[i]) && v.is_zero() {
                return Err(PatternError::Constraint(format!(
                    "{} must be nonzero",
                    self.var_names[i]
                )));
            }
            if self.constraints.positive && !v.is_positive() {
                return Err(PatternError::Constraint(format!(
                    "{} must be positive",
                    self.var_names[i]
                )));
            }
        }
        if self.constraints.distinct {
            for i in 0..assignment.len() {
                for j in i + 1..assignment.len() {
                    if assignment[i] == assignment[j] {
                        return Err(PatternError::Constraint(format!(
                            "{} and {} must be distinct",
                            self.var_names[i], self.var_names[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Fast constraint test used inside searches.
    pub fn admits(&self, assignment: &[Rational]) -> bool {
        if assignment.len() != self.arity() {
            return false;
        }
        for (i, v) in assignment.iter().enumerate() {
            if (self.constraints.nonzero || self.invertible[i]) && v.is_zero() {
                return false;
            }
            if self.constraints.positive && !v.is_positive() {
                return false;
            }
            if self.constraints.distinct && assignment[..i].contains(v) {
                return false;
            }
        }
        true
    }

    /// Evaluate every term, in term order.
    pub fn instantiate(&self, assignment: &[Rational]) -> Result<Vec<Rational>, PatternError> {
        self.check_assignment(assignment)?;
        Ok(self.instantiate_unchecked(assignment))
    }

    pub(crate) fn instantiate_unchecked(&self, assignment: &[Rational]) -> Vec<Rational> {
        let recips = self.reciprocals(assignment);
        self.terms.iter().map(|t| t.eval(assignment, &recips)).collect()
    }

    pub(crate) fn reciprocals(&self, assignment: &[Rational]) -> Vec<Option<Rational>> {
        assignment
            .iter()
            .zip(&self.invertible)
            .map(|(v, &inv)| if inv { v.recip().ok() } else { None })
            .collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = (0..self.terms.len()).map(|i| self.describe_term(i)).collect();
        write!(f, "{}{{{}}}", self.name, terms.join(", "))
    }
}

pub fn instantiate(p: &Pattern, assignment: &[Rational]) -> Result<Vec<Rational>, PatternError> {
    p.instantiate(assignment)
}

/// The common color of all instantiated terms, or `None` if they differ.
pub fn is_monochromatic(
    c: &Coloring,
    p: &Pattern,
    assignment: &[Rational],
) -> Result<Option<ColorId>, Error> {
    let values = p.instantiate(assignment)?;
    common_color(c, &values)
}

pub(crate) fn common_color(c: &Coloring, values: &[Rational]) -> Result<Option<ColorId>, Error> {
    let mut first = None;
    for v in values {
        let col = c.color(v)?;
        match first {
            None => first = Some(col),
            Some(f) if f != col => return Ok(None),
            _ => {}
        }
    }
    Ok(first)
}

fn x_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn subset_terms(n: usize, sums: bool, products: bool) -> Vec<Term> {
    let mut terms = Vec::new();
    let subset = |mask: usize| (0..n).filter(move |i| mask >> i & 1 == 1).map(Term::Var);
    if sums {
        for mask in 1..1usize << n {
            let vars: Vec<Term> = subset(mask).collect();
            terms.push(if vars.len() == 1 {
                vars.into_iter().next().unwrap()
            } else {
                Term::sum(vars)
            });
        }
    }
    if products {
        for mask in 1..1usize << n {
            let vars: Vec<Term> = subset(mask).collect();
            terms.push(if vars.len() == 1 {
                vars.into_iter().next().unwrap()
            } else {
                Term::product(vars)
            });
        }
    }
    terms
}

const NONZERO: Constraints = Constraints {
    nonzero: true,
    positive: false,
    distinct: false,
};

/// All nonempty subset sums and subset products of `x1..xn`.
pub fn sum_product_pattern(n: usize) -> Pattern {
    assert!(n >= 1, "sum-product pattern needs n >= 1");
    let names = x_names(n);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Pattern::new(format!("sum-product-{n}"), &names, &[], subset_terms(n, true, true), NONZERO)
        .expect("well-formed")
}

fn ap_pattern(len: usize) -> Pattern {
    let terms = (0..len)
        .map(|j| {
            if j == 0 {
                Term::Var(0)
            } else {
                Term::Sum(vec![
                    (Rational::one(), Term::Var(0)),
                    (Rational::from(j as i64), Term::Var(1)),
                ])
            }
        })
        .collect();
    Pattern::new(format!("vdw{len}"), &["x", "d"], &[], terms, NONZERO).expect("well-formed")
}

/// `{x, x + p(d)}` for an integer polynomial `p` with `p(0) = 0`, given by
/// its coefficients on `d, d², ...`.
pub fn pvdw_pattern(coeffs: &[i64]) -> Result<Pattern, PatternError> {
    if coeffs.iter().all(|&c| c == 0) {
        return Err(PatternError::Invalid("polynomial must be nonconstant".into()));
    }
    let mut shift = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            let power = if i == 0 { Term::Var(1) } else { Term::Pow(1, i as u32 + 1) };
            shift.push((Rational::from(c), power));
        }
    }
    let mut sum = vec![(Rational::one(), Term::Var(0))];
    sum.extend(shift);
    let name = format!(
        "pvdw:{}",
        coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    );
    Pattern::new(name, &["x", "d"], &[], vec![Term::Var(0), Term::Sum(sum)], NONZERO)
}

fn parse_suffix(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok()
}

/// Look up a catalog pattern by name.
pub fn catalog_pattern(name: &str) -> Result<Pattern, PatternError> {
    use Term::*;
    let unknown = || PatternError::Unknown(name.to_string());
    let x = || Var(0);
    let y = || Var(1);
    let p = match name {
        "schur" => Pattern::new(name, &["x", "y"], &[], vec![x(), y(), Term::sum([x(), y()])], NONZERO)?,
        "moreira" => Pattern::new(
            name,
            &["x", "y"],
            &[],
            vec![x(), Term::sum([x(), y()]), Term::product([x(), y()])],
            NONZERO,
        )?,
        "dx-d2" => {
            let dx = || Term::product([Var(0), Var(1)]);
            Pattern::new(
                name,
                &["D", "X"],
                &[],
                vec![dx(), Term::sum([dx(), Pow(0, 2)])],
                NONZERO,
            )?
        }
        "bowen-sabok-ext" => Pattern::new(
            name,
            &["x", "y"],
            &[],
            vec![
                x(),
                Term::sum([x(), y()]),
                Term::sum([x(), Pow(1, 2)]),
                y(),
                Term::product([x(), y()]),
            ],
            NONZERO,
        )?,
        "conj-6.2" => Pattern::new(
            name,
            &["x", "d"],
            &[1],
            vec![
                x(),
                Term::sum([x(), y()]),
                Term::sum([x(), Inv(1)]),
                Term::sum([x(), y(), Inv(1)]),
            ],
            NONZERO,
        )?,
        "conj-6.3" => Pattern::new(
            name,
            &["x", "d"],
            &[1],
            vec![x(), Term::sum([x(), y()]), Term::sum([x(), Inv(1)])],
            NONZERO,
        )?,
        "three-multiples" => {
            let bc = || Term::product([Var(0), Var(1)]);
            Pattern::new(
                name,
                &["b", "c"],
                &[],
                vec![
                    bc(),
                    Term::sum([bc(), Var(1)]),
                    Sum(vec![
                        (Rational::one(), bc()),
                        (Rational::from(2), Var(1)),
                    ]),
                ],
                NONZERO,
            )?
        }
        _ => {
            if let Some(n) = parse_suffix(name, "sum-product-") {
                if n == 0 || n > 12 {
                    return Err(unknown());
                }
                return Ok(sum_product_pattern(n));
            }
            if let Some(n) = parse_suffix(name, "prod-folkman-") {
                if n == 0 || n > 12 {
                    return Err(unknown());
                }
                let names = x_names(n);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                return Pattern::new(name, &names, &[], subset_terms(n, false, true), NONZERO);
            }
            if let Some(n) = parse_suffix(name, "folkman-") {
                if n == 0 || n > 12 {
                    return Err(unknown());
                }
                let names = x_names(n);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                return Pattern::new(name, &names, &[], subset_terms(n, true, false), NONZERO);
            }
            if let Some(len) = parse_suffix(name, "vdw") {
                if len < 2 {
                    return Err(unknown());
                }
                return Ok(ap_pattern(len));
            }
            if let Some(rest) = name.strip_prefix("pvdw:") {
                let coeffs: Result<Vec<i64>, _> = rest.split(',').map(str::parse).collect();
                return pvdw_pattern(&coeffs.map_err(|_| unknown())?);
            }
            return Err(unknown());
        }
    };
    Ok(p)
}

/// Catalog entries with a short description.
pub fn catalog_patterns() -> Vec<(&'static str, &'static str)> {
    vec![
        ("schur", "{x, y, x+y}"),
        ("moreira", "{x, x+y, xy}"),
        ("dx-d2", "{DX, DX+D^2}"),
        ("bowen-sabok-ext", "{x, x+y, x+y^2, y, xy}"),
        ("conj-6.2", "{x, x+d, x+1/d, x+d+1/d}"),
        ("conj-6.3", "{x, x+d, x+1/d}"),
        ("three-multiples", "{bc, bc+c, bc+2c}: three consecutive multiples of c"),
        ("sum-product-<n>", "all nonempty subset sums and subset products of x1..xn"),
        ("folkman-<n>", "all nonempty subset sums of x1..xn"),
        ("prod-folkman-<n>", "all nonempty subset products of x1..xn"),
        ("vdw<L>", "{x, x+d, ..., x+(L-1)d}"),
        ("pvdw:<c1>,<c2>,..", "{x, x+p(d)} with p(d) = c1 d + c2 d^2 + ..."),
    ]
}

/// Concrete integer-valued catalog instances, small enough for exhaustive
/// avoidance checks.
pub fn integer_catalog() -> Vec<Pattern> {
    [
        "schur",
        "moreira",
        "dx-d2",
        "bowen-sabok-ext",
        "three-multiples",
        "sum-product-2",
        "sum-product-3",
        "folkman-2",
        "folkman-3",
        "prod-folkman-2",
        "vdw3",
        "pvdw:0,1",
    ]
    .iter()
    .map(|n| catalog_pattern(n).expect("catalog entry"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, mod_coloring, padic_sec6_coloring, Domain};
    use std::collections::HashSet;

    fn qs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&n| Rational::from(n)).collect()
    }

    #[test]
    fn sum_product_term_counts() {
        assert_eq!(sum_product_pattern(1).terms().len(), 1);
        let p2 = sum_product_pattern(2);
        assert_eq!(p2.terms().len(), 4);
        assert_eq!(p2.instantiate(&qs(&[2, 3])).unwrap(), qs(&[2, 3, 5, 6]));
        assert_eq!(sum_product_pattern(3).terms().len(), 11);
    }

    #[test]
    fn dedup_matches_brute_force_term_sets() {
        // oracle: subsets as bitmasks; a sum and a product coincide only for
        // singletons, so distinct terms = |sums| + |products| - n
        for n in 1..=10usize {
            let mut set: HashSet<(bool, usize)> = HashSet::new();
            for mask in 1..1usize << n {
                let single = mask.count_ones() == 1;
                set.insert((true, mask));
                set.insert((single, mask));
            }
            assert_eq!(sum_product_pattern(n).terms().len(), set.len());
            assert_eq!(set.len(), (1 << (n + 1)) - 2 - n);
        }
    }

    #[test]
    fn catalog_shapes() {
        let m = catalog_pattern("moreira").unwrap();
        assert_eq!((m.arity(), m.terms().len()), (2, 3));
        let s = catalog_pattern("schur").unwrap();
        assert_eq!(s.to_string(), "schur{x, y, x+y}");
        assert_eq!(catalog_pattern("dx-d2").unwrap().terms().len(), 2);
        assert_eq!(catalog_pattern("bowen-sabok-ext").unwrap().terms().len(), 5);
        assert_eq!(catalog_pattern("conj-6.2").unwrap().terms().len(), 4);
        assert_eq!(catalog_pattern("folkman-3").unwrap().terms().len(), 7);
        assert_eq!(catalog_pattern("prod-folkman-3").unwrap().terms().len(), 7);
        assert_eq!(catalog_pattern("vdw4").unwrap().to_string(), "vdw4{x, x+d, x+2*d, x+3*d}");
        assert!(matches!(catalog_pattern("nope"), Err(PatternError::Unknown(_))));
        assert!(catalog_pattern("vdw1").is_err());
        for (name, _) in catalog_patterns() {
            if !name.contains('<') {
                catalog_pattern(name).unwrap();
            }
        }
    }

    #[test]
    fn conj_6_3_instantiation() {
        let p = catalog_pattern("conj-6.3").unwrap();
        let v = p.instantiate(&qs(&[1, 2])).unwrap();
        assert_eq!(v, vec![1.into(), 3.into(), "3/2".parse().unwrap()]);
        assert!(!p.is_integer_valued());
        assert!(p.instantiate(&qs(&[1, 0])).is_err());
    }

    #[test]
    fn constraint_violations_rejected() {
        let p = sum_product_pattern(2);
        assert!(matches!(
            p.instantiate(&qs(&[0, 1])),
            Err(PatternError::Constraint(_))
        ));
        assert!(matches!(p.instantiate(&qs(&[1])), Err(PatternError::Arity { .. })));
        let d = p.clone().with_distinct(true);
        assert!(d.instantiate(&qs(&[2, 2])).is_err());
        assert!(p.instantiate(&qs(&[2, 2])).is_ok());
    }

    #[test]
    fn pvdw_pattern_terms() {
        let p = pvdw_pattern(&[0, 1]).unwrap();
        assert_eq!(p.name(), "pvdw:0,1");
        assert_eq!(p.instantiate(&qs(&[5, 3])).unwrap(), qs(&[5, 14]));
        assert_eq!(catalog_pattern("pvdw:0,1").unwrap(), p);
        assert!(pvdw_pattern(&[0, 0]).is_err());
    }

    #[test]
    fn monochromatic_examples() {
        let sp3 = sum_product_pattern(3);
        let k = constant_coloring(Domain::Naturals);
        assert_eq!(is_monochromatic(&k, &sp3, &qs(&[1, 2, 3])).unwrap(), Some(ColorId(0)));

        let three = catalog_pattern("three-multiples").unwrap();
        let padic = padic_sec6_coloring();
        assert_eq!(three.instantiate(&qs(&[1, 1])).unwrap(), qs(&[1, 2, 3]));
        assert_eq!(is_monochromatic(&padic, &three, &qs(&[1, 1])).unwrap(), None);

        let parity = mod_coloring(2, Domain::Naturals);
        let schur = catalog_pattern("schur").unwrap();
        assert_eq!(is_monochromatic(&parity, &schur, &qs(&[2, 4])).unwrap(), Some(ColorId(0)));
        assert!(is_monochromatic(&parity, &catalog_pattern("conj-6.3").unwrap(), &qs(&[1, 2])).is_err());
    }

    #[test]
    fn structural_flags() {
        for p in integer_catalog() {
            assert!(p.is_integer_valued(), "{}", p.name());
            assert!(p.is_monotone(), "{}", p.name());
        }
        assert!(!catalog_pattern("conj-6.2").unwrap().is_monotone());
    }

    #[test]
    fn normal_form_identifies_equal_terms() {
        let p = Pattern::new(
            "dup",
            &["x", "y"],
            &[],
            vec![
                Term::sum([Term::Var(0), Term::Var(1)]),
                Term::sum([Term::Var(1), Term::Var(0)]),
                Term::product([Term::Var(0), Term::Var(0)]),
                Term::Pow(0, 2),
            ],
            Constraints::default(),
        )
        .unwrap();
        assert_eq!(p.terms().len(), 2);
    }
}
