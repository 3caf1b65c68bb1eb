use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::Alphabet;
use crate::dsl::{Count, Regex};

use super::{AutomatonError, Dfa, DEFAULT_STATE_CAP};

/// Compiles over the standard alphabet with the default state cap.
pub fn compile(r: &Regex) -> Result<Dfa, AutomatonError> {
    Compiler::new(Alphabet::standard()).compile(r)
}

pub fn compile_with(r: &Regex, alphabet: &Arc<Alphabet>) -> Result<Dfa, AutomatonError> {
    Compiler::new(alphabet.clone()).compile(r)
}

/// Regex-to-DFA compiler that memoizes sub-expressions. Keep one per thread.
#[derive(Debug, Clone)]
pub struct Compiler {
    alphabet: Arc<Alphabet>,
    cap: usize,
    memo: HashMap<Regex, Dfa>,
}

impl Compiler {
    pub fn new(alphabet: Arc<Alphabet>) -> Compiler {
        Compiler {
            alphabet,
            cap: DEFAULT_STATE_CAP,
            memo: HashMap::new(),
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Compiler {
        self.cap = cap;
        self
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Drops memoized automata, e.g. between unrelated batches.
    pub fn clear(&mut self) {
        self.memo.clear();
    }

    pub fn universal(&self) -> Dfa {
        Dfa::universal(&self.alphabet).with_cap(self.cap)
    }

    pub fn empty(&self) -> Dfa {
        Dfa::empty(&self.alphabet).with_cap(self.cap)
    }

    pub fn compile(&mut self, r: &Regex) -> Result<Dfa, AutomatonError> {
        if let Some(d) = self.memo.get(r) {
            return Ok(d.clone());
        }
        let d = self.build(r)?;
        if self.memo.len() > 50_000 {
            self.memo.clear();
        }
        self.memo.insert(r.clone(), d.clone());
        Ok(d)
    }

    fn build(&mut self, r: &Regex) -> Result<Dfa, AutomatonError> {
        let a = self.alphabet.clone();
        let cap = self.cap;
        let any_star = || Dfa::universal(&a).with_cap(cap);
        Ok(match r {
            Regex::Class(c) => Dfa::symbols(&a, a.class_set(*c)).with_cap(cap),
            Regex::Char(c) => {
                let i = a.index_of(*c).ok_or(AutomatonError::UnknownSymbol(*c))?;
                Dfa::word(&a, &[i as u8]).with_cap(cap)
            }
            Regex::Str(s) => {
                let syms = s
                    .chars()
                    .map(|c| {
                        a.index_of(c)
                            .map(|i| i as u8)
                            .ok_or(AutomatonError::UnknownSymbol(c))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Dfa::word(&a, &syms).with_cap(cap)
            }
            Regex::AnonConst | Regex::Hole => return Err(AutomatonError::NotConcrete),
            Regex::StartWith(x) => self.compile(x)?.concat(&any_star())?,
            Regex::EndWith(x) => any_star().concat(&self.compile(x)?)?,
            Regex::Contain(x) => any_star().concat(&self.compile(x)?)?.concat(&any_star())?,
            Regex::Not(x) => self.compile(x)?.complement(),
            Regex::Optional(x) => self.compile(x)?.optional()?,
            Regex::Star(x) => self.compile(x)?.star()?,
            Regex::NotCc(x) => {
                let inner = self.compile(x)?;
                Dfa::symbols(&a, a.full())
                    .with_cap(cap)
                    .difference(&inner)?
            }
            Regex::Concat(x, y) => {
                let dx = self.compile(x)?;
                dx.concat(&self.compile(y)?)?
            }
            Regex::And(x, y) => {
                let dx = self.compile(x)?;
                dx.intersect(&self.compile(y)?)?
            }
            Regex::Or(x, y) => {
                let dx = self.compile(x)?;
                dx.union(&self.compile(y)?)?
            }
            Regex::Rep(x, k) => {
                let k = value(*k)?;
                self.compile(x)?.repeat(k, Some(k))?
            }
            Regex::RepAtLeast(x, k) => {
                let k = value(*k)?;
                self.compile(x)?.repeat(k, None)?
            }
            Regex::RepRange(x, k1, k2) => {
                let (k1, k2) = (value(*k1)?, value(*k2)?);
                self.compile(x)?.repeat(k1, Some(k2))?
            }
        })
    }
}

fn value(k: Count) -> Result<u32, AutomatonError> {
    k.value().ok_or(AutomatonError::NotConcrete)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_dsl, CharClass};

    fn dfa(s: &str) -> Dfa {
        compile(&parse_dsl(s).unwrap()).unwrap()
    }

    #[test]
    fn null_and_universal() {
        assert!(dfa("<null>").is_empty());
        let u = dfa("star(<any>)");
        assert!(u.is_universal());
        assert!(u.matches(""));
        assert!(u.matches("aZ9-"));
    }

    #[test]
    fn rep_zero_is_epsilon() {
        let d = dfa("rep(<num>,0)");
        assert!(d.matches(""));
        assert!(!d.matches("1"));
        assert_eq!(d, Dfa::epsilon(&Alphabet::standard()));
    }

    #[test]
    fn conflicts_and_redundancies() {
        assert!(dfa("and(<let>,<num>)").is_empty());
        assert!(!dfa("<num>").is_empty());
        assert!(dfa("or(<let>,<low>)").equivalent(&dfa("<let>")).unwrap());
        assert_eq!(dfa("or(<let>,<low>)"), dfa("<let>"));
        assert!(!dfa("reprange(<num>,1,2)")
            .equivalent(&dfa("rep(<num>,2)"))
            .unwrap());
    }

    #[test]
    fn fixtures_membership() {
        let a = dfa("and(startwith(<C0>),endwith(rep(<num>,4)))");
        assert!(a.matches("C01234"));
        assert!(a.matches("C0xx9876"));
        assert!(!a.matches("C04444x"));
        let b = dfa("concat(reprange(<num>,1,2),concat(<.>,reprange(<num>,1,2)))");
        assert!(b.matches("12.3"));
        assert!(!b.matches("123.3"));
        let c = dfa("concat(repatleast(<num>,1),rep(concat(<:>,or(repatleast(<let>,1),repatleast(<num>,1))),2))");
        assert!(c.matches("12:ab:7"));
        assert!(!c.matches("12:ab"));
    }

    #[test]
    fn notcc_is_single_symbol_complement() {
        let d = dfa("notcc(<a>)");
        assert!(d.matches("b"));
        assert!(d.matches("7"));
        assert!(!d.matches("a"));
        assert!(!d.matches("bb"));
        assert!(!d.matches(""));
        let d = dfa("notcc(<num>)");
        assert!(!d.matches("3"));
        assert!(d.matches("x"));
    }

    #[test]
    fn holes_are_rejected() {
        let mut c = Compiler::new(Alphabet::standard());
        assert_eq!(c.compile(&Regex::Hole), Err(AutomatonError::NotConcrete));
        assert_eq!(
            c.compile(&Regex::AnonConst),
            Err(AutomatonError::NotConcrete)
        );
        assert_eq!(
            c.compile(&Regex::Char('?')),
            Err(AutomatonError::UnknownSymbol('?'))
        );
        assert!(c.compile(&Regex::class(CharClass::Num)).is_ok());
    }

    #[test]
    fn state_cap_is_enforced() {
        let r = parse_dsl("concat(contain(rep(<a>,6)),contain(rep(<b>,6)))").unwrap();
        let mut c = Compiler::new(Alphabet::standard()).with_cap(5);
        assert!(matches!(
            c.compile(&r),
            Err(AutomatonError::StateCapExceeded { cap: 5 })
        ));
    }
}
