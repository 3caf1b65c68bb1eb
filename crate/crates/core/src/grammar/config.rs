use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GrammarError, Nonterminal};

/// Sampler settings. Every field has a default, so a config file only needs
/// the keys it changes:
///
/// ```toml
/// copy_boost = 4.0
/// complexity_cap = 6
///
/// [weights]
/// Comp = [0.5, 1.0, 1.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrammarConfig {
    /// Production weights per nonterminal, in [`Nonterminal::productions`]
    /// order. Missing nonterminals use uniform weights.
    pub weights: BTreeMap<String, Vec<f64>>,
    /// Multiplier on re-deriving a subtree already present in the tree.
    pub copy_boost: f64,
    pub complexity_cap: u32,
    pub cons_depth_cap: usize,
    pub comp_depth_cap: usize,
    /// Whole-tree attempts before giving up on one regex.
    pub budget: usize,
    /// Local retries of one nonterminal before the whole tree is rejected.
    pub backtrack: usize,
    pub seed: u64,
    /// Probability of the star form of the separation template.
    pub star_separation: f64,
    /// Geometric decay per extra constraint or component.
    pub part_decay: f64,
    pub min_parts: usize,
    pub max_parts: usize,
    /// Part range of a segment inside the separation template.
    pub seg_min_parts: usize,
    pub seg_max_parts: usize,
}

impl Default for GrammarConfig {
    fn default() -> Self {
        GrammarConfig {
            weights: BTreeMap::new(),
            copy_boost: 4.0,
            complexity_cap: 6,
            cons_depth_cap: 5,
            comp_depth_cap: 4,
            budget: 200,
            backtrack: 10,
            seed: 0,
            star_separation: 0.3,
            part_decay: 0.5,
            min_parts: 2,
            max_parts: 5,
            seg_min_parts: 1,
            seg_max_parts: 3,
        }
    }
}

impl GrammarConfig {
    pub fn from_toml_str(text: &str) -> Result<GrammarConfig, GrammarError> {
        let cfg: GrammarConfig =
            toml::from_str(text).map_err(|e| GrammarError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<GrammarConfig, GrammarError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GrammarError::Config(format!("{}: {e}", path.display())))?;
        GrammarConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), GrammarError> {
        let bad = |m: String| Err(GrammarError::Config(m));
        for (name, w) in &self.weights {
            let Some(nt) = Nonterminal::from_name(name) else {
                return bad(format!("unknown nonterminal `{name}`"));
            };
            if w.len() != nt.productions().len() {
                return bad(format!(
                    "{name} has {} productions, got {} weights",
                    nt.productions().len(),
                    w.len()
                ));
            }
            if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return bad(format!("weights of {name} must be positive"));
            }
        }
        if self.complexity_cap < 1 {
            return bad("complexity_cap must be at least 1".into());
        }
        if self.budget < 1 || self.backtrack < 1 {
            return bad("budget and backtrack must be at least 1".into());
        }
        if !(self.copy_boost.is_finite() && self.copy_boost > 0.0) {
            return bad("copy_boost must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.star_separation) {
            return bad("star_separation must lie in [0, 1]".into());
        }
        if !(self.part_decay.is_finite() && self.part_decay > 0.0) {
            return bad("part_decay must be positive".into());
        }
        if self.min_parts < 1 || self.min_parts > self.max_parts {
            return bad("need 1 <= min_parts <= max_parts".into());
        }
        if self.seg_min_parts < 1 || self.seg_min_parts > self.seg_max_parts {
            return bad("need 1 <= seg_min_parts <= seg_max_parts".into());
        }
        if self.cons_depth_cap < 2 || self.comp_depth_cap < 1 {
            return bad("depth caps too small".into());
        }
        Ok(())
    }

    /// Base production weights of `nt`.
    pub fn base_weights(&self, nt: Nonterminal) -> Vec<f64> {
        self.weights
            .get(nt.name())
            .cloned()
            .unwrap_or_else(|| vec![1.0; nt.productions().len()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = GrammarConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml_string();
        assert_eq!(GrammarConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_overrides() {
        let cfg = GrammarConfig::from_toml_str("copy_boost = 1.0\n[weights]\nComp = [0.5, 1, 1]\n")
            .unwrap();
        assert_eq!(cfg.copy_boost, 1.0);
        assert_eq!(cfg.base_weights(Nonterminal::Comp), [0.5, 1.0, 1.0]);
        assert_eq!(cfg.base_weights(Nonterminal::CC), [1.0; 5]);
        assert_eq!(cfg.complexity_cap, 6);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(GrammarConfig::from_toml_str("[weights]\nComp = [1, 1]\n").is_err());
        assert!(GrammarConfig::from_toml_str("[weights]\nComp = [0, 1, 1]\n").is_err());
        assert!(GrammarConfig::from_toml_str("[weights]\nFoo = [1]\n").is_err());
        assert!(GrammarConfig::from_toml_str("complexity_cap = 0\n").is_err());
        assert!(GrammarConfig::from_toml_str("budget = 0\n").is_err());
        assert!(GrammarConfig::from_toml_str("nonsense = 3\n").is_err());
    }
}
