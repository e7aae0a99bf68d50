//! Splitting SMILES/SAFE text into syntax units.

use super::error::TokenizerError;

const PUNCTUATION: &[u8] = b"().=#-+\\/:~@?>*$";

/// Length of the token starting at `i`, or `None` if no class matches.
fn token_len(bytes: &[u8], i: usize) -> Result<Option<usize>, TokenizerError> {
    let rest = &bytes[i..];
    let len = match rest[0] {
        b'[' => match rest.iter().position(|&b| b == b']') {
            Some(end) => end + 1,
            None => return Err(TokenizerError::UnrecognizedCharacter { ch: '[', pos: i }),
        },
        b'C' if rest.get(1) == Some(&b'l') => 2,
        b'B' if rest.get(1) == Some(&b'r') => 2,
        b'%' if rest.len() >= 3 && rest[1].is_ascii_digit() && rest[2].is_ascii_digit() => 3,
        b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' | b'b' | b'c' | b'n' | b'o' | b's' | b'p' => 1,
        b'0'..=b'9' => 1,
        b if PUNCTUATION.contains(&b) => 1,
        _ => return Ok(None),
    };
    Ok(Some(len))
}

fn unrecognized(text: &str, pos: usize) -> TokenizerError {
    TokenizerError::UnrecognizedCharacter {
        ch: text[pos..].chars().next().unwrap_or('?'),
        pos,
    }
}

/// Splits `text` into bracket atoms, two-letter halogens, single atoms,
/// `%nn` labels, digits and punctuation. Concatenating the result gives
/// `text` back.
pub fn pretokenize(text: &str) -> Result<Vec<&str>, TokenizerError> {
    if text.is_empty() {
        return Err(TokenizerError::EmptyInput);
    }
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let len = token_len(bytes, i)?.ok_or_else(|| unrecognized(text, i))?;
        out.push(&text[i..i + len]);
        i += len;
    }
    Ok(out)
}

/// Like [`pretokenize`], but unrecognized characters (and unterminated
/// brackets) become single-character tokens instead of errors.
pub fn pretokenize_lenient(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let len = match token_len(bytes, i) {
            Ok(Some(len)) => len,
            _ => text[i..].chars().next().map_or(1, char::len_utf8),
        };
        out.push(&text[i..i + len]);
        i += len;
    }
    out
}

/// Ring-closure label denoted by a pre-token (`1`..`9` or `%nn`).
pub fn ring_label(token: &str) -> Option<u16> {
    let b = token.as_bytes();
    match b {
        [d] if d.is_ascii_digit() => Some(u16::from(d - b'0')),
        [b'%', d1, d2] if d1.is_ascii_digit() && d2.is_ascii_digit() => {
            Some(u16::from(d1 - b'0') * 10 + u16::from(d2 - b'0'))
        }
        _ => None,
    }
}
