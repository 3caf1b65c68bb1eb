//! Finite symbol alphabets and symbol sets.
//!
//! The standard alphabet is `[A-Z] ∪ [a-z] ∪ [0-9]` plus the sixteen special
//! characters, 78 symbols in total. Smaller alphabets built from a subset of
//! those characters are used for brute-force testing.

use std::fmt;
use std::sync::{Arc, LazyLock};

use crate::dsl::{CharClass, Regex};

/// Set of symbol indices of an [`Alphabet`]; alphabets hold at most 128 symbols.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SymSet(pub u128);

impl SymSet {
    pub const EMPTY: SymSet = SymSet(0);

    pub fn single(i: usize) -> SymSet {
        SymSet(1u128 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    pub fn union(self, o: SymSet) -> SymSet {
        SymSet(self.0 | o.0)
    }

    pub fn intersect(self, o: SymSet) -> SymSet {
        SymSet(self.0 & o.0)
    }

    pub fn minus(self, o: SymSet) -> SymSet {
        SymSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: SymSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..128).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for SymSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The sixteen characters of the `<spec>` class.
pub const SPEC_CHARS: &str = "-,;.+:!@#_$%&*=^";

/// An ordered symbol set partitioned into the `cap`/`low`/`num`/`spec` classes.
#[derive(Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    lookup: [u8; 128],
    cap: SymSet,
    low: SymSet,
    num: SymSet,
    spec: SymSet,
}

static STANDARD: LazyLock<Arc<Alphabet>> = LazyLock::new(|| {
    let mut s = String::new();
    s.extend('A'..='Z');
    s.extend('a'..='z');
    s.extend('0'..='9');
    s.push_str(SPEC_CHARS);
    Arc::new(Alphabet::build(&s).expect("standard alphabet"))
});

static REDUCED: LazyLock<Arc<Alphabet>> =
    LazyLock::new(|| Arc::new(Alphabet::build("Aab01-").expect("reduced alphabet")));

const ABSENT: u8 = u8::MAX;

impl Alphabet {
    /// The 78-symbol alphabet every class of the DSL is defined over.
    pub fn standard() -> Arc<Alphabet> {
        STANDARD.clone()
    }

    /// Six symbols with every class represented: `A`, `a`, `b`, `0`, `1`, `-`.
    pub fn reduced() -> Arc<Alphabet> {
        REDUCED.clone()
    }

    /// Alphabet over the given characters, each of which must belong to the
    /// standard alphabet.
    pub fn new(symbols: &str) -> Option<Arc<Alphabet>> {
        Alphabet::build(symbols).map(Arc::new)
    }

    fn build(symbols: &str) -> Option<Alphabet> {
        let mut lookup = [ABSENT; 128];
        let mut list = Vec::new();
        let (mut cap, mut low, mut num, mut spec) =
            (SymSet::EMPTY, SymSet::EMPTY, SymSet::EMPTY, SymSet::EMPTY);
        for c in symbols.chars() {
            if !c.is_ascii() || lookup[c as usize] != ABSENT {
                return None;
            }
            let i = list.len();
            match c {
                'A'..='Z' => cap.insert(i),
                'a'..='z' => low.insert(i),
                '0'..='9' => num.insert(i),
                c if SPEC_CHARS.contains(c) => spec.insert(i),
                _ => return None,
            }
            lookup[c as usize] = i as u8;
            list.push(c);
        }
        if list.is_empty() {
            return None;
        }
        Some(Alphabet {
            symbols: list,
            lookup,
            cap,
            low,
            num,
            spec,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> char {
        self.symbols[i]
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        if !c.is_ascii() {
            return None;
        }
        match self.lookup[c as usize] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    /// Symbol indices of `s`, or `None` if some character is outside the alphabet.
    pub fn encode(&self, s: &str) -> Option<Vec<u8>> {
        s.chars()
            .map(|c| self.index_of(c).map(|i| i as u8))
            .collect()
    }

    pub fn decode(&self, syms: &[u8]) -> String {
        syms.iter().map(|&i| self.symbols[i as usize]).collect()
    }

    pub fn full(&self) -> SymSet {
        if self.len() == 128 {
            SymSet(u128::MAX)
        } else {
            SymSet((1u128 << self.len()) - 1)
        }
    }

    pub fn class_set(&self, c: CharClass) -> SymSet {
        match c {
            CharClass::Let => self.cap.union(self.low),
            CharClass::Cap => self.cap,
            CharClass::Low => self.low,
            CharClass::Num => self.num,
            CharClass::Any => self.full(),
            CharClass::Spec => self.spec,
            CharClass::Null => SymSet::EMPTY,
        }
    }

    /// Class of a single symbol: one of `cap`, `low`, `num`, `spec`.
    pub fn class_of(&self, i: usize) -> CharClass {
        if self.cap.contains(i) {
            CharClass::Cap
        } else if self.low.contains(i) {
            CharClass::Low
        } else if self.num.contains(i) {
            CharClass::Num
        } else {
            CharClass::Spec
        }
    }

    /// Symbols a literal-like expression may use anywhere in a matched
    /// string: classes, constants and alternations/repetitions of those.
    /// Characters outside the alphabet are ignored.
    pub fn mentioned(&self, r: &Regex) -> SymSet {
        let mut set = SymSet::EMPTY;
        r.walk(&mut |n| match n {
            Regex::Class(c) => set = set.union(self.class_set(*c)),
            Regex::Char(c) => {
                if let Some(i) = self.index_of(*c) {
                    set.insert(i);
                }
            }
            Regex::Str(s) => {
                for c in s.chars() {
                    if let Some(i) = self.index_of(c) {
                        set.insert(i);
                    }
                }
            }
            _ => {}
        });
        set
    }
}
