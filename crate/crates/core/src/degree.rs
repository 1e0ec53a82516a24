//! Degree-distribution algebra for LDPC ensembles.
//!
//! Distributions come in two perspectives. The edge perspective
//! `λ(x) = Σ λ_i x^(i-1)` gives the fraction of edges touching degree-`i`
//! nodes; the node perspective `v(x) = Σ v_i x^i` gives the fraction of
//! nodes of degree `i` and is the only form that can carry degree-zero
//! nodes. Stacking two matrices over the same columns convolves their
//! variable-side node distributions and mixes their check sides by edge
//! count; [`split_residual`] inverts the stacking.
//!
//! [`de_threshold`] runs the binary-erasure-channel density evolution
//! recursion `x ← ε·λ(1 − ρ(1 − x))` and bisects for the largest `ε` that
//! converges.

use thiserror::Error;

/// Coefficients must sum to one within this tolerance, and equality of
/// distributions is judged against it.
pub const COEFF_TOL: f64 = 1e-9;

const DE_CONVERGENCE: f64 = 1e-8;
const DE_MAX_ITERS: usize = 5000;
const DE_BISECTION_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum DistError {
    #[error("coefficient for degree {degree} out of range: {value}")]
    CoefficientOutOfRange { degree: u32, value: f64 },
    #[error("{side} coefficients sum to {sum}, expected 1")]
    NotNormalized { side: &'static str, sum: f64 },
    #[error("edge-perspective distributions require degrees >= 1")]
    ZeroDegreeEdge,
    #[error("degenerate node distribution: all mass at degree zero")]
    Degenerate,
    #[error("duplicate degree {0}")]
    DuplicateDegree(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

fn validate(pairs: &[(u32, f64)], side: &'static str, allow_zero: bool) -> Result<(), DistError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut sum = 0.0;
    for &(d, c) in pairs {
        if !allow_zero && d == 0 {
            return Err(DistError::ZeroDegreeEdge);
        }
        if !(0.0..=1.0 + COEFF_TOL).contains(&c) || !c.is_finite() {
            return Err(DistError::CoefficientOutOfRange { degree: d, value: c });
        }
        if !seen.insert(d) {
            return Err(DistError::DuplicateDegree(d));
        }
        sum += c;
    }
    if (sum - 1.0).abs() > COEFF_TOL {
        return Err(DistError::NotNormalized { side, sum });
    }
    Ok(())
}

fn sorted(mut pairs: Vec<(u32, f64)>) -> Vec<(u32, f64)> {
    pairs.retain(|&(_, c)| c != 0.0);
    pairs.sort_unstable_by_key(|&(d, _)| d);
    pairs
}

/// Evaluates `Σ c_d x^(d-1)` (the edge-perspective polynomial).
fn eval_edge(pairs: &[(u32, f64)], x: f64) -> f64 {
    pairs
        .iter()
        .map(|&(d, c)| c * x.powi(d as i32 - 1))
        .sum()
}

/// `Σ c_d / d`, i.e. the integral of the edge polynomial over [0,1].
fn edge_integral(pairs: &[(u32, f64)]) -> f64 {
    pairs.iter().map(|&(d, c)| c / d as f64).sum()
}

/// An edge-perspective degree distribution pair (λ, ρ).
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    lambda: Vec<(u32, f64)>,
    rho: Vec<(u32, f64)>,
}

impl DegreeDistribution {
    pub fn new(lambda: Vec<(u32, f64)>, rho: Vec<(u32, f64)>) -> Result<Self, DistError> {
        validate(&lambda, "lambda", false)?;
        validate(&rho, "rho", false)?;
        Ok(DegreeDistribution {
            lambda: sorted(lambda),
            rho: sorted(rho),
        })
    }

    /// The (v, c)-regular ensemble: λ = x^(v-1), ρ = x^(c-1).
    pub fn regular(var_degree: u32, check_degree: u32) -> Self {
        DegreeDistribution::new(vec![(var_degree, 1.0)], vec![(check_degree, 1.0)])
            .expect("regular distribution is valid")
    }

    pub fn lambda(&self) -> &[(u32, f64)] {
        &self.lambda
    }

    pub fn rho(&self) -> &[(u32, f64)] {
        &self.rho
    }

    pub fn lambda_at(&self, x: f64) -> f64 {
        eval_edge(&self.lambda, x)
    }

    pub fn rho_at(&self, x: f64) -> f64 {
        eval_edge(&self.rho, x)
    }

    /// Node-perspective view of the variable side: v_i ∝ λ_i / i.
    pub fn variable_node_dist(&self) -> NodeDistribution {
        let total = edge_integral(&self.lambda);
        NodeDistribution {
            v: sorted(
                self.lambda
                    .iter()
                    .map(|&(d, c)| (d, c / d as f64 / total))
                    .collect(),
            ),
        }
    }

    /// The designed rate `1 − (Σ ρ_i/i) / (Σ λ_i/i)`.
    pub fn design_rate(&self) -> f64 {
        1.0 - edge_integral(&self.rho) / edge_integral(&self.lambda)
    }
}

/// A node-perspective variable degree distribution; degree 0 is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDistribution {
    v: Vec<(u32, f64)>,
}

impl NodeDistribution {
    pub fn new(v: Vec<(u32, f64)>) -> Result<Self, DistError> {
        validate(&v, "v", true)?;
        Ok(NodeDistribution { v: sorted(v) })
    }

    pub fn coeffs(&self) -> &[(u32, f64)] {
        &self.v
    }

    /// Average node degree.
    pub fn mean_degree(&self) -> f64 {
        self.v.iter().map(|&(d, c)| d as f64 * c).sum()
    }

    /// Edge-perspective view λ_i ∝ i·v_i; degree-zero mass carries no edges
    /// and is dropped. Errors if no positive-degree mass remains.
    pub fn to_edge(&self) -> Result<Vec<(u32, f64)>, DistError> {
        let total = self.mean_degree();
        if total <= 0.0 {
            return Err(DistError::Degenerate);
        }
        Ok(sorted(
            self.v
                .iter()
                .filter(|&&(d, _)| d > 0)
                .map(|&(d, c)| (d, d as f64 * c / total))
                .collect(),
        ))
    }
}

/// Converts an edge-perspective pair to the node perspective of its variable
/// side.
pub fn edge_to_node(d: &DegreeDistribution) -> NodeDistribution {
    d.variable_node_dist()
}

/// Converts a node distribution back to an edge-perspective λ polynomial.
pub fn node_to_edge(v: &NodeDistribution) -> Result<Vec<(u32, f64)>, DistError> {
    v.to_edge()
}

/// One side of a stacked matrix: variable side in node form (so degree-zero
/// columns are representable) plus the edge-perspective check side.
#[derive(Debug, Clone, PartialEq)]
pub struct StackDist {
    pub vars: NodeDistribution,
    /// Edge-perspective check polynomial; empty when the side has no rows.
    pub rho: Vec<(u32, f64)>,
}

impl StackDist {
    pub fn new(vars: NodeDistribution, rho: Vec<(u32, f64)>) -> Result<Self, DistError> {
        if !rho.is_empty() {
            validate(&rho, "rho", false)?;
        }
        Ok(StackDist { vars, rho: sorted(rho) })
    }

    pub fn from_edge(d: &DegreeDistribution) -> Self {
        StackDist {
            vars: d.variable_node_dist(),
            rho: d.rho().to_vec(),
        }
    }

    /// The empty component (zero rows): convolution identity.
    pub fn empty() -> Self {
        StackDist {
            vars: NodeDistribution::new(vec![(0, 1.0)]).unwrap(),
            rho: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vars.mean_degree() <= COEFF_TOL
    }

    /// Edge-perspective pair; errors if the variable side has no edges.
    pub fn edge_pair(&self) -> Result<DegreeDistribution, DistError> {
        DegreeDistribution::new(self.vars.to_edge()?, self.rho.clone())
    }

    /// Designed rate `1 − rows/cols` of a matrix sampled from this side.
    pub fn design_rate(&self) -> f64 {
        if self.is_empty() {
            return 1.0;
        }
        // rows/cols = mean_var_degree / mean_check_degree
        let mean_check = 1.0 / edge_integral(&self.rho);
        1.0 - self.vars.mean_degree() / mean_check
    }
}

/// Degree distribution of the vertical stack `[G; G1]`.
///
/// The variable side is the product of the two node generating functions
/// (column weights add independently); the check side is the edge-count
/// weighted mixture of the two check polynomials.
pub fn combine_stacked(g: &StackDist, g1: &StackDist) -> StackDist {
    // Convolution of node distributions.
    let mut conv = std::collections::BTreeMap::new();
    for &(da, ca) in g.vars.coeffs() {
        for &(db, cb) in g1.vars.coeffs() {
            *conv.entry(da + db).or_insert(0.0) += ca * cb;
        }
    }
    let vars = NodeDistribution::new(conv.into_iter().collect()).expect("convolution is valid");
    // Edge-weighted mixture of the check sides.
    let (ea, eb) = (g.vars.mean_degree(), g1.vars.mean_degree());
    let mut rho = std::collections::BTreeMap::new();
    if ea + eb > 0.0 {
        for &(d, c) in &g.rho {
            *rho.entry(d).or_insert(0.0) += c * ea / (ea + eb);
        }
        for &(d, c) in &g1.rho {
            *rho.entry(d).or_insert(0.0) += c * eb / (ea + eb);
        }
    }
    StackDist {
        vars,
        rho: sorted(rho.into_iter().collect()),
    }
}

/// Edge-perspective convenience wrapper around [`combine_stacked`].
pub fn combine_stacked_edge(
    g: &DegreeDistribution,
    g1: &DegreeDistribution,
) -> Result<DegreeDistribution, DistError> {
    combine_stacked(&StackDist::from_edge(g), &StackDist::from_edge(g1)).edge_pair()
}

/// Inverts [`combine_stacked`]: given the full stack `d1` and the sub-matrix
/// `d2`, returns the residual side, or `None` when no valid (nonnegative)
/// residual exists.
pub fn split_residual(d1: &StackDist, d2: &StackDist) -> Option<StackDist> {
    let m1 = d1.vars.mean_degree();
    let m2 = d2.vars.mean_degree();
    if m2 > m1 + COEFF_TOL {
        return None;
    }
    // Variable side: polynomial division of the node generating functions,
    // by ascending degree.
    let v1 = d1.vars.coeffs();
    let v2 = d2.vars.coeffs();
    let max1 = v1.last().map_or(0, |&(d, _)| d);
    let max2 = v2.last().map_or(0, |&(d, _)| d);
    if max2 > max1 {
        return None;
    }
    let dense = |pairs: &[(u32, f64)], len: usize| {
        let mut out = vec![0.0; len];
        for &(d, c) in pairs {
            out[d as usize] = c;
        }
        out
    };
    let a = dense(v1, max1 as usize + 1);
    let b = dense(v2, max2 as usize + 1);
    let lead2 = b.iter().position(|&c| c > COEFF_TOL)?;
    let mut rem = a;
    let mut q = vec![0.0; max1 as usize - max2 as usize + 1];
    for i in 0..=max1 as usize - max2 as usize {
        let idx = lead2 + i;
        if idx >= rem.len() {
            break;
        }
        let coef = rem[idx] / b[lead2];
        if coef < -COEFF_TOL {
            return None;
        }
        let coef = coef.max(0.0);
        q[i] = coef;
        for (j, &bc) in b.iter().enumerate().skip(lead2) {
            let k = i + j;
            if k < rem.len() {
                rem[k] -= coef * bc;
            }
        }
    }
    if rem.iter().any(|&c| c.abs() > 1e-7) {
        return None;
    }
    let vars = NodeDistribution::new(
        q.iter()
            .enumerate()
            .filter(|&(_, &c)| c > 1e-12)
            .map(|(d, &c)| (d as u32, c))
            .collect(),
    )
    .ok()?;
    // Check side: un-mix by edge counts.
    let mbar = m1 - m2;
    let rho = if mbar <= COEFF_TOL {
        Vec::new()
    } else {
        let mut map = std::collections::BTreeMap::new();
        for &(d, c) in &d1.rho {
            *map.entry(d).or_insert(0.0) += c * m1 / mbar;
        }
        for &(d, c) in &d2.rho {
            *map.entry(d).or_insert(0.0) -= c * m2 / mbar;
        }
        let pairs: Vec<(u32, f64)> = map
            .into_iter()
            .filter(|&(_, c)| c.abs() > COEFF_TOL)
            .collect();
        if pairs.iter().any(|&(_, c)| c < -COEFF_TOL) {
            return None;
        }
        sorted(pairs.into_iter().map(|(d, c)| (d, c.max(0.0))).collect())
    };
    StackDist::new(vars, rho).ok()
}

/// Edge-perspective wrapper around [`split_residual`].
pub fn split_residual_edge(
    d1: &DegreeDistribution,
    d2: &DegreeDistribution,
) -> Option<DegreeDistribution> {
    split_residual(&StackDist::from_edge(d1), &StackDist::from_edge(d2))
        .and_then(|s| s.edge_pair().ok())
}

/// Whether the density-evolution recursion converges at erasure probability
/// `eps` under the pinned convergence budget.
pub fn de_converges(d: &DegreeDistribution, eps: f64) -> bool {
    let mut x = eps;
    for _ in 0..DE_MAX_ITERS {
        x = eps * d.lambda_at(1.0 - d.rho_at(1.0 - x));
        if x < DE_CONVERGENCE {
            return true;
        }
    }
    false
}

/// Erasure-probability threshold of the ensemble: bisection (absolute
/// tolerance 1e-4) on the largest erasure probability for which the density
/// evolution recursion started at x0 = ε falls below 1e-8 within 5000
/// iterations.
pub fn de_threshold(d: &DegreeDistribution) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > DE_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if de_converges(d, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Parses a polynomial like `x^2`, `0.6087x+0.3913x^2`, `0.7+0.3x` into
/// (exponent, coefficient) pairs.
pub fn parse_poly(s: &str) -> Result<Vec<(u32, f64)>, DistError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(DistError::Parse("empty polynomial".into()));
    }
    let mut out = std::collections::BTreeMap::new();
    for term in compact.split('+') {
        if term.is_empty() {
            return Err(DistError::Parse(format!("empty term in '{s}'")));
        }
        let (coeff_str, exp) = match term.find('x') {
            None => (term, 0u32),
            Some(pos) => {
                let after = &term[pos + 1..];
                let exp = if after.is_empty() {
                    1
                } else if let Some(e) = after.strip_prefix('^') {
                    e.parse::<u32>()
                        .map_err(|_| DistError::Parse(format!("bad exponent in '{term}'")))?
                } else {
                    return Err(DistError::Parse(format!("bad term '{term}'")));
                };
                (&term[..pos], exp)
            }
        };
        let coeff = if coeff_str.is_empty() {
            1.0
        } else {
            coeff_str
                .parse::<f64>()
                .map_err(|_| DistError::Parse(format!("bad coefficient in '{term}'")))?
        };
        *out.entry(exp).or_insert(0.0) += coeff;
    }
    Ok(out.into_iter().collect())
}

/// Edge-perspective polynomial from text: the coefficient of `x^e` is the
/// fraction of edges on degree-(e+1) nodes.
pub fn parse_edge_poly(s: &str) -> Result<Vec<(u32, f64)>, DistError> {
    Ok(parse_poly(s)?.into_iter().map(|(e, c)| (e + 1, c)).collect())
}

/// Node-perspective polynomial from text: the coefficient of `x^d` is the
/// fraction of nodes of degree `d`.
pub fn parse_node_poly(s: &str) -> Result<Vec<(u32, f64)>, DistError> {
    parse_poly(s)
}

/// Formats (degree, coeff) pairs as the edge polynomial they represent.
pub fn format_edge_poly(pairs: &[(u32, f64)]) -> String {
    if pairs.is_empty() {
        return "0".to_string();
    }
    pairs
        .iter()
        .map(|&(d, c)| {
            let e = d - 1;
            let xpart = match e {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            };
            if (c - 1.0).abs() < 1e-12 && e > 0 {
                xpart
            } else if e == 0 {
                format!("{c}")
            } else {
                format!("{c}{xpart}")
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// Reads the distribution text format: lines `lambda <degree> <coeff>`,
/// `rho <degree> <coeff>` and optionally `v <degree> <coeff>` for node-form
/// variable sides. Returns the stack form (and the edge pair when no `v`
/// lines are present).
pub fn read_distribution_text(text: &str) -> Result<StackDist, DistError> {
    let mut lambda = Vec::new();
    let mut rho = Vec::new();
    let mut v = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let kind = it.next().unwrap();
        let degree: u32 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| DistError::Parse(format!("line {}: bad degree", ln + 1)))?;
        let coeff: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| DistError::Parse(format!("line {}: bad coefficient", ln + 1)))?;
        match kind {
            "lambda" => lambda.push((degree, coeff)),
            "rho" => rho.push((degree, coeff)),
            "v" => v.push((degree, coeff)),
            other => {
                return Err(DistError::Parse(format!(
                    "line {}: unknown key '{other}'",
                    ln + 1
                )))
            }
        }
    }
    let vars = if !v.is_empty() {
        if !lambda.is_empty() {
            return Err(DistError::Parse(
                "give either lambda or v lines, not both".into(),
            ));
        }
        NodeDistribution::new(v)?
    } else {
        DegreeDistribution::new(lambda, rho.clone())?.variable_node_dist()
    };
    StackDist::new(vars, rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn edge_node_round_trip_regular() {
        let d = DegreeDistribution::regular(3, 6);
        let v = d.variable_node_dist();
        assert_eq!(v.coeffs(), &[(3, 1.0)]);
        assert_eq!(v.to_edge().unwrap(), vec![(3, 1.0)]);
    }

    #[test]
    fn edge_to_node_paper_example() {
        // λ_G = 0.6087x + 0.3913x^2 has node form 0.7x^2 + 0.3x^3.
        let d = DegreeDistribution::new(vec![(2, 0.6087), (3, 0.3913)], vec![(7, 1.0)]).unwrap();
        let v = d.variable_node_dist();
        let c: std::collections::BTreeMap<u32, f64> = v.coeffs().iter().copied().collect();
        assert!(close(c[&2], 0.7, 1e-4));
        assert!(close(c[&3], 0.3, 1e-4));
    }

    #[test]
    fn node_edge_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let degs: Vec<u32> = (1..=6).filter(|_| rng.gen_bool(0.6)).collect();
            if degs.is_empty() {
                continue;
            }
            let mut coeffs: Vec<f64> = degs.iter().map(|_| rng.gen_range(0.01..1.0)).collect();
            let s: f64 = coeffs.iter().sum();
            coeffs.iter_mut().for_each(|c| *c /= s);
            let lambda: Vec<(u32, f64)> = degs.iter().copied().zip(coeffs).collect();
            let d = DegreeDistribution::new(lambda.clone(), vec![(6, 1.0)]).unwrap();
            let back = d.variable_node_dist().to_edge().unwrap();
            for (&(da, ca), &(db, cb)) in lambda.iter().zip(&back) {
                assert_eq!(da, db);
                assert!(close(ca, cb, 1e-12));
            }
        }
    }

    #[test]
    fn design_rates() {
        assert!(close(DegreeDistribution::regular(3, 6).design_rate(), 0.5, 1e-12));
        assert!(close(DegreeDistribution::regular(5, 6).design_rate(), 1.0 / 6.0, 1e-12));
        let d = DegreeDistribution::new(vec![(2, 1.0)], vec![(2, 1.0)]).unwrap();
        assert!(close(d.design_rate(), 0.0, 1e-12));
    }

    #[test]
    fn combine_regular_parts() {
        let g = DegreeDistribution::regular(3, 6);
        let g1 = DegreeDistribution::regular(2, 6);
        let combined = combine_stacked_edge(&g, &g1).unwrap();
        assert_eq!(combined.lambda(), &[(5, 1.0)]);
        assert_eq!(combined.rho(), &[(6, 1.0)]);
    }

    #[test]
    fn combine_with_empty_is_identity() {
        let g = StackDist::from_edge(&DegreeDistribution::regular(3, 6));
        let combined = combine_stacked(&g, &StackDist::empty());
        assert_eq!(combined, g);
    }

    #[test]
    fn combine_node_paper_example() {
        // v_G = 0.7x^2+0.3x^3 with v_G1 = 0.7+0.3x, both check sides x^6:
        // λ_H* = 0.3769x + 0.4846x^2 + 0.1385x^3.
        let g = StackDist::new(
            NodeDistribution::new(vec![(2, 0.7), (3, 0.3)]).unwrap(),
            vec![(7, 1.0)],
        )
        .unwrap();
        let g1 = StackDist::new(
            NodeDistribution::new(vec![(0, 0.7), (1, 0.3)]).unwrap(),
            vec![(7, 1.0)],
        )
        .unwrap();
        let h = combine_stacked(&g, &g1);
        let lambda = h.vars.to_edge().unwrap();
        let c: std::collections::BTreeMap<u32, f64> = lambda.iter().copied().collect();
        assert!(close(c[&2], 0.3769, 1e-4));
        assert!(close(c[&3], 0.4846, 1e-4));
        assert!(close(c[&4], 0.1385, 1e-4));
        assert_eq!(h.rho, vec![(7, 1.0)]);
    }

    #[test]
    fn split_residual_paper_example() {
        // d1 var-5/check-6, d2 = (3,6)-regular: residual λ̄ = x, ρ̄ = x^5.
        let d1 = DegreeDistribution::regular(5, 6);
        let d2 = DegreeDistribution::regular(3, 6);
        let res = split_residual_edge(&d1, &d2).expect("feasible");
        assert_eq!(res.lambda(), &[(2, 1.0)]);
        assert_eq!(res.rho(), &[(6, 1.0)]);
    }

    #[test]
    fn split_residual_equal_inputs_empty() {
        let d = StackDist::from_edge(&DegreeDistribution::regular(3, 6));
        let res = split_residual(&d, &d).expect("feasible");
        assert!(res.is_empty());
    }

    #[test]
    fn split_residual_infeasible() {
        // d2 with higher variable degree than d1 forces a negative residual.
        let d1 = DegreeDistribution::regular(3, 6);
        let d2 = DegreeDistribution::regular(5, 6);
        assert!(split_residual_edge(&d1, &d2).is_none());
    }

    #[test]
    fn combine_then_split_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let degs: Vec<u32> = (1..=5).filter(|_| rng.gen_bool(0.5)).collect();
                let degs = if degs.is_empty() { vec![2] } else { degs };
                let mut coeffs: Vec<f64> =
                    degs.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
                let s: f64 = coeffs.iter().sum();
                coeffs.iter_mut().for_each(|c| *c /= s);
                StackDist::from_edge(
                    &DegreeDistribution::new(
                        degs.into_iter().zip(coeffs).collect(),
                        vec![(6, 1.0)],
                    )
                    .unwrap(),
                )
            };
            let g = mk(&mut rng);
            let g1 = mk(&mut rng);
            let stacked = combine_stacked(&g, &g1);
            let back = split_residual(&stacked, &g).expect("round trip feasible");
            let as_map = |pairs: &[(u32, f64)]| -> std::collections::BTreeMap<u32, f64> {
                pairs.iter().copied().filter(|&(_, c)| c > 1e-9).collect()
            };
            let (got_v, want_v) = (as_map(back.vars.coeffs()), as_map(g1.vars.coeffs()));
            assert_eq!(got_v.keys().collect::<Vec<_>>(), want_v.keys().collect::<Vec<_>>());
            for (d, c) in &got_v {
                assert!(close(*c, want_v[d], 1e-9));
            }
            let (got_r, want_r) = (as_map(&back.rho), as_map(&g1.rho));
            assert_eq!(got_r.keys().collect::<Vec<_>>(), want_r.keys().collect::<Vec<_>>());
            for (d, c) in &got_r {
                assert!(close(*c, want_r[d], 1e-9));
            }
        }
    }

    #[test]
    fn de_threshold_regular_families() {
        let t36 = de_threshold(&DegreeDistribution::regular(3, 6));
        assert!(close(t36, 0.4294, 1e-3), "got {t36}");
        let t56 = de_threshold(&DegreeDistribution::regular(5, 6));
        assert!(close(t56, 0.551, 2e-3), "got {t56}");
    }

    #[test]
    fn de_threshold_stability_limited_family() {
        // λ = x, ρ = x^5: the stability condition ε λ'(0) ρ'(1) = 1 puts the
        // threshold at exactly 1/5.
        let d = DegreeDistribution::new(vec![(2, 1.0)], vec![(6, 1.0)]).unwrap();
        let t = de_threshold(&d);
        assert!(close(t, 0.2000, 1e-3), "got {t}");
    }

    #[test]
    fn de_threshold_monotone_in_check_degree() {
        let a = de_threshold(&DegreeDistribution::regular(3, 6));
        let b = de_threshold(&DegreeDistribution::regular(3, 7));
        assert!(b <= a);
        let c = de_threshold(&DegreeDistribution::regular(4, 8));
        let d = de_threshold(&DegreeDistribution::regular(4, 9));
        assert!(d <= c);
    }

    #[test]
    fn parse_and_format_polys() {
        assert_eq!(parse_edge_poly("x^2").unwrap(), vec![(3, 1.0)]);
        assert_eq!(
            parse_edge_poly("0.6087x+0.3913x^2").unwrap(),
            vec![(2, 0.6087), (3, 0.3913)]
        );
        assert_eq!(parse_node_poly("0.7+0.3x").unwrap(), vec![(0, 0.7), (1, 0.3)]);
        assert_eq!(format_edge_poly(&[(3, 1.0)]), "x^2");
        assert!(parse_poly("x^").is_err());
        assert!(parse_poly("").is_err());
    }

    #[test]
    fn distribution_text_round_trip() {
        let text = "lambda 3 1.0\nrho 6 1.0\n";
        let s = read_distribution_text(text).unwrap();
        let pair = s.edge_pair().unwrap();
        assert_eq!(pair.lambda(), &[(3, 1.0)]);
        let node_text = "v 0 0.7\nv 1 0.3\nrho 7 1.0\n";
        let s = read_distribution_text(node_text).unwrap();
        assert_eq!(s.vars.coeffs(), &[(0, 0.7), (1, 0.3)]);
        assert!(read_distribution_text("foo 1 1.0").is_err());
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(DegreeDistribution::new(vec![(2, 0.5)], vec![(6, 1.0)]).is_err());
        assert!(DegreeDistribution::new(vec![(0, 1.0)], vec![(6, 1.0)]).is_err());
        assert!(NodeDistribution::new(vec![(1, 1.5)]).is_err());
        let degenerate = NodeDistribution::new(vec![(0, 1.0)]).unwrap();
        assert!(degenerate.to_edge().is_err());
    }
}
