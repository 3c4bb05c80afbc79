//! Splitting schemes: coefficient registry, expansion into sub-flows, time
//! stepping and algebraic order checks.
//!
//! A scheme with `s` stages applies, to the right of the state first,
//!
//! ```text
//! U(b_1) T(a_1) U(b_2) ... T(a_s) U(b_{s+1})
//! ```
//!
//! where each `U` block is an electric flow (`Tu`), a fused electric and
//! modified-potential flow (`ModPot`, extra `c_i`), or the one-dimensional
//! rescaled electric flow (`D1Mod`, extra `c_i`, `d_i`, `e_i`).

use crate::error::{Error, Result};
use crate::flows::{DCoefficients, Propagator};
use crate::grid::{mean_density, DistFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Plain kinetic/electric alternation.
    Tu,
    /// Electric blocks augmented by the flow of `[[T, U], U]`.
    ModPot,
    /// One-dimensional blocks folding the higher nested brackets into `U`.
    D1Mod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub name: String,
    pub family: Family,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

/// One entry of an expanded scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flow {
    Kinetic(f64),
    Electric(f64),
    Modified { b: f64, c: f64 },
    OneDim(DCoefficients),
}

fn mirror(half: &[f64], len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| half[if i < half.len() { i } else { len - 1 - i }])
        .collect()
}

fn is_palindrome(v: &[f64]) -> bool {
    v.iter().zip(v.iter().rev()).all(|(x, y)| x == y)
}

impl SchemeSpec {
    /// General constructor; `c`, `d`, `e` may be empty (read as zeros).
    pub fn new(
        name: impl Into<String>,
        family: Family,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        d: Vec<f64>,
        e: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        let s = a.len();
        if s == 0 || b.len() != s + 1 {
            return Err(Error::Config(format!(
                "scheme `{name}`: need s >= 1 kinetic and s + 1 electric coefficients, got {} and {}",
                s,
                b.len()
            )));
        }
        let fill = |v: Vec<f64>, what: &str| -> Result<Vec<f64>> {
            match v.len() {
                0 => Ok(vec![0.0; s + 1]),
                l if l == s + 1 => Ok(v),
                l => Err(Error::Config(format!(
                    "scheme `{name}`: {what} has {l} entries, expected {}",
                    s + 1
                ))),
            }
        };
        let c = fill(c, "c")?;
        let d = fill(d, "d")?;
        let e = fill(e, "e")?;
        let nonzero = |v: &[f64]| v.iter().any(|&x| x != 0.0);
        let ok = match family {
            Family::Tu => !nonzero(&c) && !nonzero(&d) && !nonzero(&e),
            Family::ModPot => !nonzero(&d) && !nonzero(&e),
            Family::D1Mod => true,
        };
        if !ok {
            return Err(Error::Config(format!(
                "scheme `{name}`: coefficients not allowed for family {family:?}"
            )));
        }
        Ok(Self {
            name,
            family,
            a,
            b,
            c,
            d,
            e,
        })
    }

    /// Symmetric scheme from the leading halves of each coefficient list.
    fn symmetric(
        name: &str,
        family: Family,
        stages: usize,
        a: &[f64],
        b: &[f64],
        c: &[f64],
        d: &[f64],
        e: &[f64],
    ) -> Self {
        let m = |half: &[f64], len: usize| {
            if half.is_empty() {
                Vec::new()
            } else {
                mirror(half, len)
            }
        };
        Self::new(
            name,
            family,
            mirror(a, stages),
            mirror(b, stages + 1),
            m(c, stages + 1),
            m(d, stages + 1),
            m(e, stages + 1),
        )
        .expect("registry coefficients are well formed")
    }

    pub fn stages(&self) -> usize {
        self.a.len()
    }

    /// Number of exponentials in one step, `2 s + 1`.
    pub fn sigma(&self) -> usize {
        2 * self.stages() + 1
    }

    /// Flows per step when the trailing flow is merged into the next step.
    pub fn flows_per_step(&self) -> usize {
        2 * self.stages()
    }

    pub fn is_symmetric(&self) -> bool {
        is_palindrome(&self.a)
            && is_palindrome(&self.b)
            && is_palindrome(&self.c)
            && is_palindrome(&self.d)
            && is_palindrome(&self.e)
    }

    pub fn supports_dim(&self, dim: usize) -> bool {
        self.family != Family::D1Mod || dim == 1
    }

    /// Flow sequence in application order (first entry acts first).
    pub fn sequence(&self) -> Vec<Flow> {
        let s = self.stages();
        let mut out = Vec::with_capacity(self.sigma());
        for i in 0..=s {
            out.push(match self.family {
                Family::Tu => Flow::Electric(self.b[i]),
                Family::ModPot => Flow::Modified {
                    b: self.b[i],
                    c: self.c[i],
                },
                Family::D1Mod => Flow::OneDim(DCoefficients {
                    b: self.b[i],
                    c: self.c[i],
                    d: self.d[i],
                    e: self.e[i],
                }),
            });
            if i < s {
                out.push(Flow::Kinetic(self.a[i]));
            }
        }
        out
    }
}

/// Palindromic flow sequence of a symmetric scheme.
pub fn expand_symmetric(spec: &SchemeSpec) -> Result<Vec<Flow>> {
    if !spec.is_symmetric() {
        return Err(Error::AsymmetricSpec(spec.name.clone()));
    }
    Ok(spec.sequence())
}

/// Advances `f` by one step of size `tau`.
pub fn step(prop: &Propagator, f: &mut DistFn, spec: &SchemeSpec, tau: f64) -> Result<()> {
    let dim = prop.grid().dim();
    if !spec.supports_dim(dim) {
        return Err(Error::DimensionMismatch(format!(
            "scheme `{}` requires dim = 1, grid has dim = {dim}",
            spec.name
        )));
    }
    let m = match spec.family {
        Family::D1Mod => mean_density(f),
        _ => 0.0,
    };
    for flow in spec.sequence() {
        match flow {
            Flow::Kinetic(a) => prop.flow_t(f, a * tau)?,
            Flow::Electric(b) => prop.flow_u(f, b * tau)?,
            Flow::Modified { b, c } => prop.flow_c(f, tau, b, c)?,
            Flow::OneDim(coef) => prop.flow_d(f, tau, coef, m)?,
        }
    }
    Ok(())
}

/// `(|sum a - 1|, |sum b - 1|)`.
pub fn consistency_residuals(spec: &SchemeSpec) -> (f64, f64) {
    let sa: f64 = spec.a.iter().sum();
    let sb: f64 = spec.b.iter().sum();
    ((sa - 1.0).abs(), (sb - 1.0).abs())
}

/// Residuals of the six order-6 conditions for symmetric schemes of the
/// `Tu` and `ModPot` families, each sum minus its right-hand side
/// (1/3, 1/3, 1/5, 6/5!, 1/5!, 1/5!).
///
/// Sums use 1-based arrays `A = (0, a_1, ..., a_s)`, `B = (b_1, ..., b_{s+1})`
/// and `C`, i.e. the kinetic coefficient attached to `b_i` is the one that
/// precedes it in the sequence.
pub fn order6_residuals(spec: &SchemeSpec) -> Result<[f64; 6]> {
    if spec.family == Family::D1Mod {
        return Err(Error::UnsupportedFamily(spec.name.clone()));
    }
    if !spec.is_symmetric() {
        return Err(Error::AsymmetricSpec(spec.name.clone()));
    }
    let s = spec.stages();
    let n = s + 1;
    // 1-based with a dummy slot at 0.
    let mut a = vec![0.0; n + 1];
    a[2..=n].copy_from_slice(&spec.a);
    let mut b = vec![0.0; n + 1];
    b[1..=n].copy_from_slice(&spec.b);
    let mut c = vec![0.0; n + 1];
    c[1..=n].copy_from_slice(&spec.c);
    let sum = |v: &[f64], lo: usize, hi: usize| -> f64 {
        if lo > hi {
            0.0
        } else {
            v[lo..=hi].iter().sum()
        }
    };

    let mut r1 = 0.0;
    let mut r3 = 0.0;
    for i in 1..=n {
        let t = sum(&a, 1, i);
        r1 += b[i] * t * t;
        r3 += b[i] * t.powi(4);
    }
    r1 -= 1.0 / 3.0;
    r3 -= 1.0 / 5.0;

    let mut r2 = -2.0 * sum(&c, 1, n);
    for i in 1..=n {
        r2 += a[i] * sum(&b, i, n).powi(2);
    }
    r2 -= 1.0 / 3.0;

    let mut r4 = 0.0;
    for i in 2..=n {
        let mut inner = 0.0;
        for j in 1..i {
            inner += b[j] * sum(&a, j + 1, i).powi(3);
        }
        r4 += b[i] * inner;
    }
    r4 -= 6.0 / 120.0;

    let mut r5 = 0.0;
    for i in 2..=n {
        let mut first = 0.0;
        for j in 1..i {
            first += a[j] * sum(&c, j, i - 1);
        }
        let mut second = 0.0;
        for j in 1..i.saturating_sub(1) {
            for k in j + 1..i {
                second += a[j] * a[k] * sum(&b, j, k - 1) * sum(&b, k, i - 1);
            }
        }
        r5 += a[i] * (2.0 * first + second);
    }
    r5 -= 1.0 / 120.0;

    let mut r6 = 0.0;
    for i in 2..=n {
        r6 += 2.0 * a[i] * (b[i] * sum(&c, 1, i - 1) + c[i] * sum(&b, 1, i - 1));
    }
    for i in 2..=s {
        let mut tail = 0.0;
        for k in i + 1..=n {
            tail += a[k] * sum(&b, i, k - 1) * sum(&b, k, n);
        }
        r6 += a[i]
            * (2.0 * sum(&b, i + 1, n) * sum(&c, 1, i - 1)
                + 2.0 * sum(&c, i + 1, n) * sum(&b, 1, i - 1)
                + sum(&b, 1, i - 1) * tail);
    }
    r6 -= 1.0 / 120.0;

    Ok([r1, r2, r3, r4, r5, r6])
}

/// Nominal order of accuracy of a registered scheme.
pub fn nominal_order(name: &str) -> Option<u32> {
    match name {
        "lie" => Some(1),
        "strang" => Some(2),
        "3jump" => Some(4),
        "o6-23" | "o6-9" | "o6-11" | "o6-13" | "o6-11-d1" => Some(6),
        _ => None,
    }
}

pub fn strang() -> SchemeSpec {
    SchemeSpec::symmetric("strang", Family::Tu, 1, &[1.0], &[0.5], &[], &[], &[])
}

/// First-order Lie splitting `T(tau) U(tau)`, not symmetric.
pub fn lie() -> SchemeSpec {
    SchemeSpec::new("lie", Family::Tu, vec![1.0], vec![1.0, 0.0], vec![], vec![], vec![])
        .expect("well formed")
}

/// Triple-jump composition of three Strang steps.
pub fn triple_jump() -> SchemeSpec {
    let g1 = 1.0 / (2.0 - 2f64.cbrt());
    let g2 = 1.0 - 2.0 * g1;
    SchemeSpec::symmetric(
        "3jump",
        Family::Tu,
        3,
        &[g1, g2],
        &[0.5 * g1, 0.5 * (g1 + g2)],
        &[],
        &[],
        &[],
    )
}

/// Eleven-stage order-6 RKN splitting with 23 exponentials.
pub fn o6_23() -> SchemeSpec {
    let b = [
        0.0414649985182624,
        0.198128671918067,
        -0.0400061921041533,
        0.0752539843015807,
        -0.0115113874206879,
    ];
    let a = [
        0.123229775946271,
        0.290553797799558,
        -0.127049212625417,
        -0.246331761062075,
        0.357208872795928,
    ];
    let mut half_b = b.to_vec();
    half_b.push(0.5 - b.iter().sum::<f64>());
    let mut half_a = a.to_vec();
    half_a.push(1.0 - 2.0 * a.iter().sum::<f64>());
    SchemeSpec::symmetric("o6-23", Family::Tu, 11, &half_a, &half_b, &[], &[], &[])
}

pub fn o6_9() -> SchemeSpec {
    SchemeSpec::symmetric(
        "o6-9",
        Family::ModPot,
        4,
        &[1.079852426382430882456991, -0.579852426382430882456991],
        &[
            0.359950808794143627485664,
            -0.1437147273026540434771131,
            0.567527837017020831982899,
        ],
        &[0.0, -0.0139652542242388403673, -0.039247029382345626020],
        &[],
        &[],
    )
}

pub fn o6_11() -> SchemeSpec {
    let a2 = 0.303629319055488881944104;
    SchemeSpec::symmetric(
        "o6-11",
        Family::ModPot,
        5,
        &[a2, a2, -0.2145172762219555277764167],
        &[
            0.086971698963920047813358,
            0.560744966588102145251453,
            -0.1477166655520221930648117,
        ],
        &[
            -1.98364114652831655458915e-6,
            0.00553752115152236516667268,
            0.00284218110811634663914191,
        ],
        &[],
        &[],
    )
}

pub fn o6_13() -> SchemeSpec {
    let b2 = 0.048233230175303256742758;
    SchemeSpec::symmetric(
        "o6-13",
        Family::ModPot,
        6,
        &[
            0.270101518812605621575254,
            -0.108612186368692920020654,
            0.338510667556087298445400,
        ],
        &[b2, b2, 0.236139260374249444475399, 0.334788558550288084078170],
        // Stored with the opposite sign of the published column, which matches
        // the orientation of the fused block and of the order conditions.
        &[
            -0.000256656790401210726353,
            -0.000943977158092759357851,
            0.002494619878121813220455,
            0.002670269183371982607658,
        ],
        &[],
        &[],
    )
}

pub fn o6_11_d1() -> SchemeSpec {
    SchemeSpec::symmetric(
        "o6-11-d1",
        Family::D1Mod,
        5,
        &[
            0.168735950563437422448196,
            0.377851589220928303880766,
            -0.093175079568731452657924,
        ],
        &[
            0.049086460976116245491441,
            0.264177609888976700200146,
            0.186735929134907054308413,
        ],
        &[
            -0.000069728715055305084099,
            -0.000625704827430047189169,
            -0.002213085124045325561636,
        ],
        &[0.0, -2.916600457689847816445691e-6, 3.048480261700038788680723e-5],
        &[0.0, 0.0, 4.985549387875068121593988e-7],
    )
}

/// All registered schemes, in CLI order.
pub fn registry() -> Vec<SchemeSpec> {
    vec![
        strang(),
        triple_jump(),
        o6_23(),
        o6_9(),
        o6_11(),
        o6_13(),
        o6_11_d1(),
    ]
}

/// Looks up a registered scheme (or `lie`) by CLI name.
pub fn by_name(name: &str) -> Result<SchemeSpec> {
    if name == "lie" {
        return Ok(lie());
    }
    registry()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScheme(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{init_landau, PhaseGrid};

    const ORDER6: [&str; 5] = ["o6-23", "o6-9", "o6-11", "o6-13", "o6-11-d1"];

    #[test]
    fn registry_names() {
        let names: Vec<String> = registry().into_iter().map(|s| s.name).collect();
        assert_eq!(
            names,
            ["strang", "3jump", "o6-23", "o6-9", "o6-11", "o6-13", "o6-11-d1"]
        );
        assert!(matches!(by_name("rk4"), Err(Error::UnknownScheme(_))));
    }

    #[test]
    fn registered_schemes_are_symmetric_and_consistent() {
        for s in registry() {
            assert!(s.is_symmetric(), "{}", s.name);
            assert_eq!(s.sigma(), s.a.len() + s.b.len());
            let (ra, rb) = consistency_residuals(&s);
            assert!(ra <= 1e-12 && rb <= 1e-12, "{}: {ra:e} {rb:e}", s.name);
        }
        assert_eq!(consistency_residuals(&strang()), (0.0, 0.0));
    }

    #[test]
    fn published_values() {
        let s = o6_9();
        assert!((2.0 * (s.a[0] + s.a[1]) - 1.0).abs() < 1e-15);
        let s = o6_13();
        assert_eq!(s.b[0], s.b[1]);
        assert_eq!(s.b[0], 0.048233230175303256742758);
        let s = o6_11();
        assert_eq!(s.a[0], s.a[1]);
    }

    #[test]
    fn sigma_counts() {
        let sig: Vec<usize> = registry().iter().map(SchemeSpec::sigma).collect();
        assert_eq!(sig, [3, 7, 23, 9, 11, 13, 11]);
        assert_eq!(strang().flows_per_step(), 2);
    }

    #[test]
    fn expansions() {
        assert_eq!(
            expand_symmetric(&strang()).unwrap(),
            [Flow::Electric(0.5), Flow::Kinetic(1.0), Flow::Electric(0.5)]
        );
        let s = o6_9();
        let seq = expand_symmetric(&s).unwrap();
        assert_eq!(seq.len(), 9);
        let c = |i: usize| Flow::Modified { b: s.b[i], c: s.c[i] };
        let t = |i: usize| Flow::Kinetic(s.a[i]);
        assert_eq!(seq, [c(0), t(0), c(1), t(1), c(2), t(1), c(1), t(0), c(0)]);

        let s = o6_13();
        let seq = expand_symmetric(&s).unwrap();
        assert_eq!(seq.len(), 13);
        let order = [0usize, 1, 2, 3, 2, 1, 0];
        for (slot, &i) in order.iter().enumerate() {
            assert_eq!(seq[2 * slot], Flow::Modified { b: s.b[i], c: s.c[i] });
        }
        let order_a = [0usize, 1, 2, 2, 1, 0];
        for (slot, &i) in order_a.iter().enumerate() {
            assert_eq!(seq[2 * slot + 1], Flow::Kinetic(s.a[i]));
        }
        assert!(matches!(expand_symmetric(&lie()), Err(Error::AsymmetricSpec(_))));
    }

    #[test]
    fn perturbed_consistency() {
        let mut s = o6_11();
        s.b[0] += 1e-3;
        let (_, rb) = consistency_residuals(&s);
        assert!((rb - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn order6_conditions_hold_for_order6_schemes() {
        for name in ORDER6.iter().filter(|n| **n != "o6-11-d1") {
            let r = order6_residuals(&by_name(name).unwrap()).unwrap();
            for (k, v) in r.iter().enumerate() {
                assert!(v.abs() <= 1e-10, "{name} condition {}: {v:e}", k + 1);
            }
        }
        assert!(matches!(
            order6_residuals(&o6_11_d1()),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn strang_residuals_regression() {
        // Evaluated exactly by hand from the sums with a = (0, 1), b = (1/2, 1/2).
        let r = order6_residuals(&strang()).unwrap();
        let expect = [1.0 / 6.0, -1.0 / 12.0, 3.0 / 10.0, 1.0 / 5.0, -1.0 / 120.0, -1.0 / 120.0];
        for (got, want) in r.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn triple_jump_is_fourth_order() {
        let r = order6_residuals(&triple_jump()).unwrap();
        assert!(r[0].abs() < 1e-14 && r[1].abs() < 1e-14);
        assert!(r[2].abs() > 1e-3);
    }

    #[test]
    fn step_semantics() {
        let g = PhaseGrid::new(1, 32, 64, 0.5, 8.0).unwrap();
        let p = Propagator::new(g);
        let f = init_landau(g, 0.3).unwrap();

        let mut a = f.clone();
        step(&p, &mut a, &strang(), 0.4).unwrap();
        let mut b = f.clone();
        p.flow_u(&mut b, 0.2).unwrap();
        p.flow_t(&mut b, 0.4).unwrap();
        p.flow_u(&mut b, 0.2).unwrap();
        assert_eq!(a, b);

        let uniform = init_landau(g, 0.0).unwrap();
        let mut a = uniform.clone();
        step(&p, &mut a, &lie(), 0.4).unwrap();
        let mut b = uniform.clone();
        p.flow_t(&mut b, 0.4).unwrap();
        assert_eq!(a, b);

        for s in registry() {
            let mut h = f.clone();
            step(&p, &mut h, &s, 0.0).unwrap();
            assert_eq!(h, f, "{}", s.name);
        }

        let g2 = PhaseGrid::new(2, 8, 32, 0.5, 8.0).unwrap();
        let p2 = Propagator::new(g2);
        let mut f2 = init_landau(g2, 0.1).unwrap();
        assert!(matches!(
            step(&p2, &mut f2, &o6_11_d1(), 0.1),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
