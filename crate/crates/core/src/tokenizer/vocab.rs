//! Token vocabulary with reserved special tokens.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::error::TokenizerError;

pub const EOS: u32 = 0;
pub const BOS: u32 = 1;
pub const UNK: u32 = 2;
pub const MASK: u32 = 3;
pub const PAD: u32 = 4;
pub const SPECIAL_TOKENS: [&str; 5] = ["<eos>", "<bos>", "<unk>", "<mask>", "<pad>"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyFile", into = "VocabularyFile")]
pub struct Vocabulary {
    tokens: Vec<String>,
    id_of: HashMap<String, u32>,
    merges: Vec<(String, String)>,
    merge_rank: HashMap<(String, String), usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    tokens: Vec<String>,
    merges: Vec<(String, String)>,
}

impl From<Vocabulary> for VocabularyFile {
    fn from(v: Vocabulary) -> Self {
        VocabularyFile {
            tokens: v.tokens,
            merges: v.merges,
        }
    }
}

impl TryFrom<VocabularyFile> for Vocabulary {
    type Error = TokenizerError;
    fn try_from(f: VocabularyFile) -> Result<Self, Self::Error> {
        Vocabulary::from_parts(f.tokens, f.merges)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, TokenizerError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => {
                return Err(TokenizerError::InvalidVocabulary(format!(
                    "bad escape '\\{}' in '{s}'",
                    other.map(String::from).unwrap_or_default()
                )))
            }
        }
    }
    Ok(out)
}

impl Vocabulary {
    /// Specials followed by `alphabet`, without merges.
    pub fn with_alphabet<I: IntoIterator<Item = String>>(alphabet: I) -> Result<Vocabulary, TokenizerError> {
        let tokens = SPECIAL_TOKENS.iter().map(|s| s.to_string()).chain(alphabet).collect();
        Vocabulary::from_parts(tokens, Vec::new())
    }

    /// Checks that the specials lead, surfaces are unique and every merge
    /// produces a known surface.
    pub fn from_parts(tokens: Vec<String>, merges: Vec<(String, String)>) -> Result<Vocabulary, TokenizerError> {
        if tokens.len() < SPECIAL_TOKENS.len() || tokens[..SPECIAL_TOKENS.len()] != SPECIAL_TOKENS {
            return Err(TokenizerError::InvalidVocabulary("special tokens must occupy ids 0-4".into()));
        }
        let mut id_of = HashMap::with_capacity(tokens.len());
        for (id, t) in tokens.iter().enumerate() {
            if t.is_empty() {
                return Err(TokenizerError::InvalidVocabulary(format!("empty surface at id {id}")));
            }
            if id_of.insert(t.clone(), id as u32).is_some() {
                return Err(TokenizerError::InvalidVocabulary(format!("duplicate surface '{t}'")));
            }
        }
        for (l, r) in &merges {
            let special = |s: &str| SPECIAL_TOKENS.contains(&s);
            if special(l) || special(r) {
                return Err(TokenizerError::InvalidVocabulary("special tokens cannot be merged".into()));
            }
            if !id_of.contains_key(l) || !id_of.contains_key(r) || !id_of.contains_key(&format!("{l}{r}")) {
                return Err(TokenizerError::InvalidVocabulary(format!("merge ({l}, {r}) uses unknown surfaces")));
            }
        }
        let merge_rank = merges.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        Ok(Vocabulary {
            tokens,
            id_of,
            merges,
            merge_rank,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, surface: &str) -> Option<u32> {
        self.id_of.get(surface).copied()
    }

    pub fn surface(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn is_special(id: u32) -> bool {
        (id as usize) < SPECIAL_TOKENS.len()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    /// Adds a surface if new; returns its id.
    pub(crate) fn insert(&mut self, surface: String) -> u32 {
        if let Some(&id) = self.id_of.get(&surface) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.id_of.insert(surface.clone(), id);
        self.tokens.push(surface);
        id
    }

    pub(crate) fn push_merge(&mut self, left: String, right: String) {
        self.merge_rank.insert((left.clone(), right.clone()), self.merges.len());
        self.merges.push((left, right));
    }

    /// Application order of a merge, if it exists.
    pub(crate) fn merge_rank(&self, left: &str, right: &str) -> Option<usize> {
        self.merge_rank.get(&(left.to_string(), right.to_string())).copied()
    }

    /// One escaped surface per line; line k holds id k.
    pub fn to_vocab_file(&self) -> String {
        self.tokens.iter().map(|t| escape(t) + "\n").collect()
    }

    /// One `left TAB right` merge per line, in application order.
    pub fn to_merges_file(&self) -> String {
        self.merges
            .iter()
            .map(|(l, r)| format!("{}\t{}\n", escape(l), escape(r)))
            .collect()
    }

    pub fn from_files(vocab_text: &str, merges_text: &str) -> Result<Vocabulary, TokenizerError> {
        let tokens = vocab_text.lines().map(unescape).collect::<Result<Vec<_>, _>>()?;
        let mut merges = Vec::new();
        for (k, line) in merges_text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (l, r) = line
                .split_once('\t')
                .ok_or_else(|| TokenizerError::InvalidVocabulary(format!("merge line {} has no tab", k + 1)))?;
            merges.push((unescape(l)?, unescape(r)?));
        }
        Vocabulary::from_parts(tokens, merges)
    }
}
