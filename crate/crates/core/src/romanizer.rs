//! Rule-table transliteration into printable ASCII.
//!
//! Input is put in canonical composed form, then scanned left to right.
//! At each position the longest matching rule key is replaced; printable
//! ASCII that no rule matches is copied, and anything else is dropped
//! (or replaced by a placeholder) and counted.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use unicode_normalization::UnicodeNormalization;

use crate::corpus::Corpus;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransliterationTable {
    pub language: String,
    rules: Vec<(String, String)>,
    // first char of key -> (key chars, replacement), longest key first
    by_first: BTreeMap<char, Vec<(Vec<char>, String)>>,
}

fn is_printable_ascii(c: char) -> bool {
    (' '..='~').contains(&c)
}

impl TransliterationTable {
    /// Builds a table from rules in priority order. Keys are composed (NFC).
    pub fn new(
        language: impl Into<String>,
        rules: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut table = TransliterationTable {
            language: language.into(),
            rules: Vec::new(),
            by_first: BTreeMap::new(),
        };
        for (key, replacement) in rules {
            table.push(key, replacement)?;
        }
        Ok(table)
    }

    fn push(&mut self, key: String, replacement: String) -> Result<()> {
        let key: String = key.nfc().collect();
        if key.is_empty() {
            return Err(Error::Invalid("empty transliteration key".to_string()));
        }
        if !replacement.chars().all(is_printable_ascii) {
            return Err(Error::Invalid(format!(
                "replacement {replacement:?} for {key:?} is not printable ASCII"
            )));
        }
        let chars: Vec<char> = key.chars().collect();
        let bucket = self.by_first.entry(chars[0]).or_default();
        // Stable: among equal lengths, earlier rules stay first.
        let pos = bucket
            .iter()
            .position(|(k, _)| k.len() < chars.len())
            .unwrap_or(bucket.len());
        bucket.insert(pos, (chars, replacement.clone()));
        self.rules.push((key, replacement));
        Ok(())
    }

    pub fn rules(&self) -> &[(String, String)] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules whose key is pure ASCII; these can make romanization non-idempotent.
    pub fn ascii_keys(&self) -> Vec<&str> {
        self.rules
            .iter()
            .filter(|(k, _)| k.is_ascii())
            .map(|(k, _)| k.as_str())
            .collect()
    }

    fn longest_match(&self, input: &[char]) -> Option<(usize, &str)> {
        self.by_first
            .get(&input[0])?
            .iter()
            .find(|(key, _)| input.starts_with(key))
            .map(|(key, rep)| (key.len(), rep.as_str()))
    }

    /// Renders the table in the file format read by [`load_table`].
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.language);
        for (k, v) in &self.rules {
            out.push_str(&format!("{k}\t{v}\n"));
        }
        out
    }
}

/// Reads `key<TAB>replacement` lines; `#` starts a comment line.
pub fn load_table(text: &str, language: &str) -> Result<TransliterationTable> {
    let mut rules = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (key, replacement) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected `key<TAB>replacement`".to_string(),
        })?;
        if key.is_empty() || replacement.contains('\t') {
            return Err(Error::Parse {
                line: line_no,
                message: "malformed rule".to_string(),
            });
        }
        let replacement = replacement.trim_end_matches('\r');
        if !replacement.chars().all(is_printable_ascii) {
            return Err(Error::Invalid(format!(
                "line {line_no}: replacement {replacement:?} is not printable ASCII"
            )));
        }
        rules.push((key.to_string(), replacement.to_string()));
    }
    TransliterationTable::new(language, rules)
}

/// What to emit for a character no rule covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unmatched {
    #[default]
    Remove,
    Placeholder(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Romanizer {
    pub table: TransliterationTable,
    pub unmatched: Unmatched,
}

impl Romanizer {
    pub fn new(table: TransliterationTable) -> Self {
        Romanizer {
            table,
            unmatched: Unmatched::Remove,
        }
    }

    /// Uses `placeholder` (printable ASCII) for unmatched characters.
    pub fn with_placeholder(mut self, placeholder: char) -> Result<Self> {
        if !is_printable_ascii(placeholder) {
            return Err(Error::Invalid(format!(
                "placeholder {placeholder:?} is not printable ASCII"
            )));
        }
        self.unmatched = Unmatched::Placeholder(placeholder);
        Ok(self)
    }

    /// Romanized word and the number of unmatched characters.
    pub fn romanize_counted(&self, word: &str) -> (String, usize) {
        romanize_with(&self.table, self.unmatched, word)
    }

    pub fn romanize(&self, word: &str) -> String {
        self.romanize_counted(word).0
    }
}

fn romanize_with(table: &TransliterationTable, policy: Unmatched, word: &str) -> (String, usize) {
    let chars: Vec<char> = word.nfc().collect();
    let mut out = String::with_capacity(chars.len());
    let mut unmatched = 0;
    let mut i = 0;
    while i < chars.len() {
        if let Some((len, rep)) = table.longest_match(&chars[i..]) {
            out.push_str(rep);
            i += len;
            continue;
        }
        let c = chars[i];
        if is_printable_ascii(c) {
            out.push(c);
        } else {
            unmatched += 1;
            if let Unmatched::Placeholder(p) = policy {
                out.push(p);
            }
        }
        i += 1;
    }
    (out, unmatched)
}

/// [`Romanizer::romanize`] with unmatched characters removed.
pub fn romanize(word: &str, table: &TransliterationTable) -> String {
    romanize_with(table, Unmatched::Remove, word).0
}

/// Romanized surfaces parallel to a corpus: `surfaces[s][t]` belongs to token `t` of sentence `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RomanizedCorpus {
    pub surfaces: Vec<Vec<String>>,
    pub unmatched: usize,
}

pub fn romanize_corpus(corpus: &Corpus, romanizer: &Romanizer) -> RomanizedCorpus {
    let mut cache: BTreeMap<&str, (String, usize)> = BTreeMap::new();
    let mut unmatched = 0;
    let surfaces = corpus
        .sentences
        .iter()
        .map(|s| {
            s.surfaces()
                .map(|w| {
                    let (r, n) = cache
                        .entry(w)
                        .or_insert_with(|| romanizer.romanize_counted(w));
                    unmatched += *n;
                    r.clone()
                })
                .collect()
        })
        .collect();
    RomanizedCorpus {
        surfaces,
        unmatched,
    }
}

/// Identity romanization: every surface maps to itself.
pub fn identity_romanization(corpus: &Corpus) -> RomanizedCorpus {
    RomanizedCorpus {
        surfaces: corpus
            .sentences
            .iter()
            .map(|s| s.surfaces().map(ToString::to_string).collect())
            .collect(),
        unmatched: 0,
    }
}

const GERMAN: &[(&str, &str)] = &[
    ("ä", "ae"),
    ("ö", "oe"),
    ("ü", "ue"),
    ("Ä", "Ae"),
    ("Ö", "Oe"),
    ("Ü", "Ue"),
    ("ß", "ss"),
];

const LATIN_DIACRITICS: &[(&str, &str)] = &[
    ("á", "a"),
    ("à", "a"),
    ("â", "a"),
    ("é", "e"),
    ("è", "e"),
    ("ê", "e"),
    ("ë", "e"),
    ("í", "i"),
    ("ì", "i"),
    ("î", "i"),
    ("ï", "i"),
    ("ó", "o"),
    ("ò", "o"),
    ("ô", "o"),
    ("ú", "u"),
    ("ù", "u"),
    ("û", "u"),
    ("ñ", "n"),
    ("ç", "c"),
    ("¡", "!"),
    ("¿", "?"),
];

const BENGALI_CONSONANTS: &[(&str, &str)] = &[
    ("ক", "k"),
    ("খ", "kh"),
    ("গ", "g"),
    ("ঘ", "gh"),
    ("ঙ", "ng"),
    ("চ", "c"),
    ("ছ", "ch"),
    ("জ", "j"),
    ("ঝ", "jh"),
    ("ঞ", "ny"),
    ("ট", "t"),
    ("ঠ", "th"),
    ("ড", "d"),
    ("ঢ", "dh"),
    ("ণ", "n"),
    ("ত", "t"),
    ("থ", "th"),
    ("দ", "d"),
    ("ধ", "dh"),
    ("ন", "n"),
    ("প", "p"),
    ("ফ", "ph"),
    ("ব", "b"),
    ("ভ", "bh"),
    ("ম", "m"),
    ("য", "y"),
    ("র", "r"),
    ("ল", "l"),
    ("শ", "sh"),
    ("ষ", "ss"),
    ("স", "s"),
    ("হ", "h"),
    ("ড়", "rr"),
    ("ঢ়", "rh"),
    ("য়", "y"),
];

const BENGALI_VOWEL_SIGNS: &[(&str, &str)] = &[
    ("া", "a"),
    ("ি", "i"),
    ("ী", "i"),
    ("ু", "u"),
    ("ূ", "u"),
    ("ৃ", "ri"),
    ("ে", "e"),
    ("ৈ", "ai"),
    ("ো", "o"),
    ("ৌ", "au"),
];

const BENGALI_OTHER: &[(&str, &str)] = &[
    ("অ", "a"),
    ("আ", "a"),
    ("ই", "i"),
    ("ঈ", "i"),
    ("উ", "u"),
    ("ঊ", "u"),
    ("ঋ", "ri"),
    ("এ", "e"),
    ("ঐ", "ai"),
    ("ও", "o"),
    ("ঔ", "au"),
    ("ং", "ng"),
    ("ঃ", "h"),
    ("ঁ", "n"),
    ("্", ""),
    ("০", "0"),
    ("১", "1"),
    ("২", "2"),
    ("৩", "3"),
    ("৪", "4"),
    ("৫", "5"),
    ("৬", "6"),
    ("৭", "7"),
    ("৮", "8"),
    ("৯", "9"),
    ("।", "."),
];

const HASANT: &str = "্";

fn owned<'a>(rules: &'a [(&'a str, &'a str)]) -> impl Iterator<Item = (String, String)> + 'a {
    rules.iter().map(|(k, v)| (k.to_string(), v.to_string()))
}

/// Shipped rule tables: `de` (umlauts and ß), `latin` (German plus common
/// Romance/Dutch diacritics) and `bn` (a small Bengali consonant/vowel set).
pub fn builtin_table(language: &str) -> Option<TransliterationTable> {
    let rules: Vec<(String, String)> = match language {
        "de" => owned(GERMAN).collect(),
        "latin" => owned(GERMAN).chain(owned(LATIN_DIACRITICS)).collect(),
        "bn" => {
            // Consonants carry an inherent `a`, dropped by a hasant and
            // replaced by a following vowel sign.
            let mut rules = Vec::new();
            for (c, r) in BENGALI_CONSONANTS {
                rules.push((format!("{c}{HASANT}"), r.to_string()));
                for (sign, v) in BENGALI_VOWEL_SIGNS {
                    rules.push((format!("{c}{sign}"), format!("{r}{v}")));
                }
                rules.push((c.to_string(), format!("{r}a")));
            }
            rules.extend(owned(BENGALI_VOWEL_SIGNS));
            rules.extend(owned(BENGALI_OTHER));
            rules
        }
        _ => return None,
    };
    Some(TransliterationTable::new(language, rules).expect("builtin tables are valid"))
}
