//! Writing fragment blocks with attachment labels.

use std::collections::HashMap;
use std::ops::Range;

use crate::chem::{render_label, BlockWriter, MolecularGraph, Piece};

use super::error::CodecError;

/// Rendered blocks plus the attachment labels in order of first
/// appearance.
pub(crate) struct Rendered {
    pub blocks: Vec<String>,
    pub labels: Vec<u16>,
}

/// Writes one block per root. Cut bonds become attachment labels chosen by
/// `label_for` (called once per cut bond, on its first appearance); the
/// bond symbol, if any, is written on that first appearance only. Internal
/// ring closures avoid `reserved`.
pub(crate) fn render_blocks(
    mol: &MolecularGraph,
    priority: &[usize],
    cut: &[bool],
    roots: &[usize],
    reserved: Range<u16>,
    label_for: &mut dyn FnMut(usize) -> Result<u16, CodecError>,
) -> Result<Rendered, CodecError> {
    let writer = BlockWriter::new(mol, priority, cut, reserved);
    let mut assigned: HashMap<usize, u16> = HashMap::new();
    let mut labels = Vec::new();
    let mut blocks = Vec::with_capacity(roots.len());
    for &root in roots {
        let mut text = String::new();
        for piece in writer.write(root) {
            match piece {
                Piece::Text(t) => text.push_str(&t),
                Piece::Attachment { bond, symbol } => match assigned.get(&bond) {
                    Some(&label) => text.push_str(&render_label(label)),
                    None => {
                        let label = label_for(bond)?;
                        assigned.insert(bond, label);
                        labels.push(label);
                        text.push_str(&symbol);
                        text.push_str(&render_label(label));
                    }
                },
            }
        }
        blocks.push(text);
    }
    Ok(Rendered { blocks, labels })
}

/// Byte ranges of the dot-separated blocks of `text` (dots inside bracket
/// atoms do not count). A trailing dot yields no empty final block.
pub(crate) fn split_blocks(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    let mut depth = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            '.' if depth == 0 => {
                spans.push((start, i));
                start = i + 1;
            }
            _ => {}
        }
    }
    if start < text.len() || spans.is_empty() {
        spans.push((start, text.len()));
    }
    spans
}
