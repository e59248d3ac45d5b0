//! Built-in experiment configs.

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// The quantitative premise the preset probes.
    pub probes: &'static str,
    pub config: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "bernoulli-progression",
        description: "fair coin, generating partition, progressions L(j) = j for j in {1,2,4,8,16}",
        probes: "independence of progression joins: h_j = 1 bit for Bernoulli shifts",
        config: r#"
name = "bernoulli-progression"

[system]
kind = "baker"

[partition]
kind = "cylinder"
window = 1

[family]
kind = "progression"
growth = "j"

[experiment]
kind = "entropy-trace"
js = [1, 2, 4, 8, 16]
"#,
    },
    Preset {
        name: "golden-rotation-decay",
        description: "rotation by F40/F41, halves, progressions of length 64",
        probes: "sequence-entropy decay for rotations and interval exchanges",
        config: r#"
name = "golden-rotation-decay"

[system]
kind = "golden"
ones = 40

[partition]
kind = "cuts"
cuts = ["0", "1/2"]

[family]
kind = "progression"
growth = "64"

[experiment]
kind = "entropy-trace"
js = [1, 2, 4, 8, 16]
"#,
    },
    Preset {
        name: "geom-2n-family",
        description: "fair coin over {2^j, ..., 2^min(j^2, 12)} for j in {2,3,4}",
        probes: "the geometric family {2^n}: every row is 1 bit",
        config: r#"
name = "geom-2n-family"

[system]
kind = "baker"

[partition]
kind = "cylinder"
window = 1

[family]
kind = "geometric"
cap = 12

[experiment]
kind = "entropy-trace"
js = [2, 3, 4]
"#,
    },
    Preset {
        name: "rect-boundary",
        description: "product of rotations (5/13, 8/21) on quadrants, 50 steps",
        probes: "linear growth of the partition boundary under a rectangle exchange",
        config: r#"
name = "rect-boundary"

[system]
kind = "product-rotation"
alpha = "5/13"
beta = "8/21"

[partition]
kind = "rectangles"
rects = [
  ["0", "1/2", "0", "1/2"],
  ["1/2", "1", "0", "1/2"],
  ["0", "1/2", "1/2", "1"],
  ["1/2", "1", "1/2", "1"],
]

[experiment]
kind = "boundary-growth"
steps = 50
"#,
    },
    Preset {
        name: "rigidity-scan",
        description: "rotation by F40/F41, depth-6 dyadic family, dist_to_identity < 1/50",
        probes: "rigidity times at continued-fraction denominators",
        config: r#"
name = "rigidity-scan"

[system]
kind = "golden"
ones = 40

[experiment]
kind = "rigidity-scan"
eps = "1/50"
m_cap = 20000
test_depth = 6
"#,
    },
    Preset {
        name: "baker-mixing",
        description: "baker map, depth-4 dyadic rectangles, dist_to_theta > 1/20 for m in (0, 100]",
        probes: "first m > j with T^m far from the projection onto constants",
        config: r#"
name = "baker-mixing"

[system]
kind = "baker"

[experiment]
kind = "mixing-scan"
j = 0
r = "1/20"
m_cap = 100
test_depth = 4
"#,
    },
    Preset {
        name: "baker-triples",
        description: "baker map, left half, all lags 1 <= m < n <= 20",
        probes: "triple correlations against the two limit formulas",
        config: r#"
name = "baker-triples"

[system]
kind = "baker"

[experiment]
kind = "triple-correlation"
set = ["0", "1/2", "0", "1"]
max_lag = 20
"#,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn presets_parse_and_plan() {
        for p in PRESETS {
            let c = ExperimentConfig::parse(p.config).unwrap_or_else(|e| panic!("{}: {e}", p.name));
            c.plan().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn required_presets_exist() {
        for n in ["bernoulli-progression", "golden-rotation-decay", "geom-2n-family", "rect-boundary", "rigidity-scan"] {
            assert!(find(n).is_some(), "{n}");
        }
    }
}
