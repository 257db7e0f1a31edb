//! Builtin surface and chart families, as printed by `list`.

use serde::Serialize;
use toponogov::model::SurfaceFamily;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub kind: &'static str,
    pub name: &'static str,
    pub parameters: &'static str,
    pub formula: &'static str,
}

pub fn builtins() -> Vec<Entry> {
    let surface = |family: SurfaceFamily, parameters| Entry { kind: "surface", name: family.name(), parameters, formula: family.formula() };
    let bumped = SurfaceFamily::Bumped { base: Box::new(SurfaceFamily::GaussTanh), amplitude: 0.0, inner: 0.0, outer: 1.0, ramp: 0.1 };
    vec![
        surface(SurfaceFamily::Flat, "t_max, t_min"),
        surface(SurfaceFamily::Sinh { k: 1.0 }, "k = 1, t_max, t_min"),
        surface(SurfaceFamily::Paraboloid { a: 1.0 }, "a = 1, t_max, t_min"),
        surface(SurfaceFamily::GaussTanh, "t_max, t_min"),
        surface(bumped, "base (surface table), amplitude, inner, outer, ramp = 0.1, t_max, t_min"),
        Entry { kind: "chart", name: "euclidean", parameters: "dimension, domain", formula: "F(x, v) = |v|" },
        Entry {
            kind: "chart",
            name: "riemannian",
            parameters: "metric = constant {matrix} | sphere {dimension, curvature} | graph {a, b}, domain",
            formula: "F(x, v) = sqrt(g_ij(x) v^i v^j)",
        },
        Entry { kind: "chart", name: "warped_polar", parameters: "surface (surface table), domain in (t, θ)", formula: "F((t, θ), v) = sqrt(v_t^2 + f(t)^2 v_θ^2)" },
        Entry { kind: "chart", name: "randers", parameters: "alpha (matrix), b, db (matrix, optional), domain", formula: "F(x, v) = sqrt(vᵀ A v) + (b + B x)·v" },
        Entry {
            kind: "chart",
            name: "minkowski",
            parameters: "norm = quartic {dimension} | quartic_blend {dimension, lambda}, domain",
            formula: "F(v)^4 = (1 - λ)|v|^4 + λ Σ v_i^4",
        },
    ]
}

pub fn render() -> String {
    let mut s = String::new();
    for e in builtins() {
        s.push_str(&format!("{:<8} {:<13} {}\n{:<22} params: {}\n", e.kind, e.name, e.formula, "", e.parameters));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_labels_the_example_surfaces() {
        let all = builtins();
        let find = |n: &str| all.iter().find(|e| e.name == n).unwrap().formula;
        assert_eq!(find("flat"), "f(t) = t");
        assert_eq!(find("gauss_tanh"), "f(t) = e^{-t^2} tanh t");
        assert!(render().contains("gauss_tanh"));
    }
}
