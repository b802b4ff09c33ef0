//! Quadrature on the reference triangle {(x, y): x, y ≥ 0, x + y ≤ 1} and on
//! the reference interval [0, 1].

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadPoint {
    pub point: [f64; 2],
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadDomain {
    Triangle,
    /// Points are returned as `[s, 0.0]`.
    Edge,
}

// Seven-point rule of degree 5 (weights sum to the reference area 1/2).
const A1: f64 = 0.101_286_507_323_456_338_800_987_361_915_123_8;
const A2: f64 = 0.470_142_064_105_115_089_770_441_209_513_447_6;
const W0: f64 = 0.1125;
const W1: f64 = 0.062_969_590_272_413_576_297_841_972_750_090_67;
const W2: f64 = 0.066_197_076_394_253_090_368_824_693_916_576;

pub const TRIANGLE_RULE: [QuadPoint; 7] = [
    QuadPoint {
        point: [1.0 / 3.0, 1.0 / 3.0],
        weight: W0,
    },
    QuadPoint {
        point: [A1, A1],
        weight: W1,
    },
    QuadPoint {
        point: [1.0 - 2.0 * A1, A1],
        weight: W1,
    },
    QuadPoint {
        point: [A1, 1.0 - 2.0 * A1],
        weight: W1,
    },
    QuadPoint {
        point: [A2, A2],
        weight: W2,
    },
    QuadPoint {
        point: [1.0 - 2.0 * A2, A2],
        weight: W2,
    },
    QuadPoint {
        point: [A2, 1.0 - 2.0 * A2],
        weight: W2,
    },
];

// Three-point Gauss–Legendre on [0, 1], degree 5.
const G: f64 = 0.387_298_334_620_741_688_517_926_539_978_239_96;

pub const EDGE_RULE: [QuadPoint; 3] = [
    QuadPoint {
        point: [0.5 - G, 0.0],
        weight: 5.0 / 18.0,
    },
    QuadPoint {
        point: [0.5, 0.0],
        weight: 8.0 / 18.0,
    },
    QuadPoint {
        point: [0.5 + G, 0.0],
        weight: 5.0 / 18.0,
    },
];

pub fn quadrature_rule(domain: QuadDomain) -> &'static [QuadPoint] {
    match domain {
        QuadDomain::Triangle => &TRIANGLE_RULE,
        QuadDomain::Edge => &EDGE_RULE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(domain: QuadDomain, f: impl Fn(f64, f64) -> f64) -> f64 {
        quadrature_rule(domain)
            .iter()
            .map(|q| q.weight * f(q.point[0], q.point[1]))
            .sum()
    }

    /// ∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    fn monomial_exact(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn reference_measures() {
        assert!((integrate(QuadDomain::Triangle, |_, _| 1.0) - 0.5).abs() < 1e-15);
        assert!((integrate(QuadDomain::Edge, |_, _| 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_rule_examples() {
        let v = integrate(QuadDomain::Triangle, |x, y| x * x * y);
        assert!((v - 1.0 / 60.0).abs() < 1e-15);
        let v = integrate(QuadDomain::Edge, |s, _| s.powi(5));
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_rule_is_exact_through_degree_five() {
        for a in 0..=5 {
            for b in 0..=(5 - a) {
                let v = integrate(QuadDomain::Triangle, |x, y| {
                    x.powi(a as i32) * y.powi(b as i32)
                });
                assert!((v - monomial_exact(a, b)).abs() < 1e-15, "x^{a} y^{b}");
            }
        }
        // degree 6 is not integrated exactly
        let v = integrate(QuadDomain::Triangle, |x, _| x.powi(6));
        assert!((v - monomial_exact(6, 0)).abs() > 1e-8);
    }

    #[test]
    fn edge_rule_is_exact_through_degree_five() {
        for k in 0..=5 {
            let v = integrate(QuadDomain::Edge, |s, _| s.powi(k));
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
