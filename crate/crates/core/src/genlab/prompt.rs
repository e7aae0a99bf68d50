//! Design-task prompts and completion checks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chem::{
    canonical_ranks_marked, has_substructure, max_ring_digit, parse_smiles, parse_smiles_with, write_smiles, Atom,
    Bond, BondOrder, Element, MolecularGraph, ParseOptions,
};
use crate::codec::{decode_safe, render_blocks, split_blocks, CodecError};
use crate::tokenizer::{pretokenize_lenient, ring_label};

use super::error::GenlabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    DeNovo,
    ScaffoldDecoration,
    MotifExtension,
    LinkerDesign,
    ScaffoldMorphing,
    Superstructure,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::DeNovo,
        Task::ScaffoldDecoration,
        Task::MotifExtension,
        Task::LinkerDesign,
        Task::ScaffoldMorphing,
        Task::Superstructure,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Task::DeNovo => "denovo",
            Task::ScaffoldDecoration => "decorate",
            Task::MotifExtension => "motif",
            Task::LinkerDesign => "linker",
            Task::ScaffoldMorphing => "morph",
            Task::Superstructure => "super",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Task {
    type Err = GenlabError;
    fn from_str(s: &str) -> Result<Task, GenlabError> {
        Ok(match s {
            "denovo" | "de_novo" => Task::DeNovo,
            "decorate" | "scaffold_decoration" => Task::ScaffoldDecoration,
            "motif" | "motif_extension" => Task::MotifExtension,
            "linker" | "linker_design" => Task::LinkerDesign,
            "morph" | "scaffold_morphing" => Task::ScaffoldMorphing,
            "super" | "superstructure" => Task::Superstructure,
            other => return Err(GenlabError::UnknownTask(other.to_string())),
        })
    }
}

/// Task inputs: molecules with `*` marking attachment sites (two entries
/// for linker design and scaffold morphing), plus superstructure sampling
/// parameters and an optional reference scaffold for morphing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PromptInput {
    pub molecules: Vec<String>,
    pub sites: usize,
    pub seed: u64,
    pub reference: Option<String>,
}

impl PromptInput {
    pub fn new<S: AsRef<str>>(molecules: &[S]) -> PromptInput {
        PromptInput {
            molecules: molecules.iter().map(|m| m.as_ref().to_string()).collect(),
            sites: 1,
            ..PromptInput::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct TaskPrompt {
    pub task: Task,
    /// SAFE text to be continued; ends with "." unless empty.
    pub prefix: String,
    /// Labels opened in the prefix that a completion must close.
    pub open_labels: Vec<u16>,
    /// Substructure the final molecule must contain; `*` matches any atom.
    pub constraint: MolecularGraph,
    /// Canonical SMILES of a scaffold the generated core must differ from.
    pub reference_core: Option<String>,
}

impl TaskPrompt {
    pub fn de_novo() -> TaskPrompt {
        TaskPrompt {
            task: Task::DeNovo,
            prefix: String::new(),
            open_labels: Vec::new(),
            constraint: MolecularGraph::new(Vec::new(), Vec::new()).expect("empty graph is valid"),
            reference_core: None,
        }
    }
}

fn wildcard_count(mol: &MolecularGraph, atoms: &[usize]) -> usize {
    atoms.iter().filter(|&&a| mol.atom(a).is_wildcard()).count()
}

fn check_arity(found: usize, min: usize, max: usize) -> Result<(), GenlabError> {
    if found < min {
        return Err(if found == 0 {
            GenlabError::NoWildcard
        } else {
            GenlabError::WrongFragmentCount { found, expected: min }
        });
    }
    if found > max {
        return Err(GenlabError::TooManyWildcards { found, allowed: max });
    }
    Ok(())
}

/// Adds `k` wildcards on distinct atoms that carry implicit hydrogens,
/// chosen uniformly with a seeded generator.
fn add_random_sites(mol: &MolecularGraph, k: usize, seed: u64) -> Result<MolecularGraph, GenlabError> {
    let eligible: Vec<usize> = (0..mol.atom_count())
        .filter(|&i| mol.atom(i).is_heavy() && mol.implicit_hydrogens(i) > 0)
        .collect();
    if k == 0 || eligible.len() < k {
        return Err(GenlabError::NoEligibleSite {
            requested: k,
            available: eligible.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = eligible.choose_multiple(&mut rng, k).copied().collect();
    chosen.sort_unstable();
    let mut atoms = mol.atoms().to_vec();
    let mut bonds = mol.bonds().to_vec();
    for site in chosen {
        atoms.push(Atom::wildcard());
        bonds.push(Bond::new(site, atoms.len() - 1, BondOrder::Single));
    }
    Ok(MolecularGraph::new(atoms, bonds)?)
}

/// Writes the non-wildcard parts of `mol` as SAFE blocks (in input order),
/// turning each bond to a wildcard into a fresh label numbered from one
/// past the highest ring digit of the canonical SMILES.
fn render_prefix(mol: &MolecularGraph) -> Result<(String, Vec<u16>), GenlabError> {
    let cut: Vec<bool> = mol
        .bonds()
        .iter()
        .map(|b| mol.atom(b.a).is_wildcard() != mol.atom(b.b).is_wildcard())
        .collect();
    let n_cuts = cut.iter().filter(|&&c| c).count();
    let max_digit = max_ring_digit(&write_smiles(mol, true, None));
    if usize::from(max_digit) + n_cuts > 99 {
        return Err(CodecError::TooManyLabels {
            needed: usize::from(max_digit) + n_cuts,
        }
        .into());
    }
    let first = max_digit + 1;
    let priority = canonical_ranks_marked(mol, &cut);
    let roots: Vec<usize> = crate::fragment::pieces(mol, &cut)
        .into_iter()
        .filter(|atoms| atoms.iter().any(|&a| !mol.atom(a).is_wildcard()))
        .map(|atoms| {
            let attached = atoms
                .iter()
                .copied()
                .filter(|&a| mol.neighbors(a).iter().any(|&(_, bi)| cut[bi]))
                .min_by_key(|&a| priority[a]);
            attached
                .or_else(|| atoms.iter().copied().min_by_key(|&a| priority[a]))
                .expect("pieces are non-empty")
        })
        .collect();
    let mut next = first;
    let rendered = render_blocks(mol, &priority, &cut, &roots, first..first + n_cuts as u16, &mut |_| {
        next += 1;
        Ok(next - 1)
    })?;
    Ok((rendered.blocks.join(".") + ".", rendered.labels))
}

/// Canonical SMILES with every wildcard written as a bare `*`, so `[*]`
/// and `*` spellings compare equal.
fn wildcard_key(mol: &MolecularGraph) -> Result<String, GenlabError> {
    let atoms = mol
        .atoms()
        .iter()
        .map(|a| if a.is_wildcard() { Atom::wildcard() } else { a.clone() })
        .collect();
    let graph = MolecularGraph::new(atoms, mol.bonds().to_vec())?;
    Ok(write_smiles(&graph, true, None))
}

fn canonical_with_wildcards(text: &str) -> Result<String, GenlabError> {
    wildcard_key(&parse_smiles(text)?)
}

/// Builds the prompt for a task. Wildcards in the inputs become open
/// attachment labels of the prefix; the constraint is the input graph with
/// its wildcards.
pub fn make_prompt(task: Task, input: &PromptInput) -> Result<TaskPrompt, GenlabError> {
    if task == Task::DeNovo {
        return Ok(TaskPrompt::de_novo());
    }
    let mol = parse_smiles(&input.molecules.join("."))?;
    let all: Vec<usize> = (0..mol.atom_count()).collect();
    let wildcards = wildcard_count(&mol, &all);
    let mut reference_core = None;
    let constraint = match task {
        Task::ScaffoldDecoration => {
            check_arity(wildcards, 1, usize::MAX)?;
            mol
        }
        Task::MotifExtension => {
            check_arity(wildcards, 1, 1)?;
            mol
        }
        Task::LinkerDesign | Task::ScaffoldMorphing => {
            let components = mol.components();
            if components.len() != 2 {
                return Err(GenlabError::WrongFragmentCount {
                    found: components.len(),
                    expected: 2,
                });
            }
            for comp in components {
                check_arity(wildcard_count(&mol, comp), 1, 1)?;
            }
            if task == Task::ScaffoldMorphing {
                reference_core = input.reference.as_deref().map(canonical_with_wildcards).transpose()?;
            }
            mol
        }
        Task::Superstructure => {
            if wildcards > 0 {
                return Err(GenlabError::TooManyWildcards {
                    found: wildcards,
                    allowed: 0,
                });
            }
            add_random_sites(&mol, input.sites, input.seed)?
        }
        Task::DeNovo => unreachable!("handled above"),
    };
    let (prefix, open_labels) = render_prefix(&constraint)?;
    Ok(TaskPrompt {
        task,
        prefix,
        open_labels,
        constraint,
        reference_core,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// The full text does not parse (message from the parser).
    Undecodable(String),
    OpenLabel(u16),
    MissingConstraint,
    /// Linker completions must be one block closing both labels.
    NotSingleLinker,
    /// Morphing must yield one connected molecule.
    Disconnected,
    /// Morphing reproduced the reference scaffold.
    SameAsReference,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Undecodable(msg) => write!(f, "undecodable: {msg}"),
            RejectReason::OpenLabel(l) => write!(f, "open_label_{l}"),
            RejectReason::MissingConstraint => f.write_str("missing_constraint"),
            RejectReason::NotSingleLinker => f.write_str("not_single_linker"),
            RejectReason::Disconnected => f.write_str("disconnected"),
            RejectReason::SameAsReference => f.write_str("same_as_reference"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected(RejectReason),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }

    pub fn reason(&self) -> Option<&RejectReason> {
        match self {
            Verdict::Accepted => None,
            Verdict::Rejected(r) => Some(r),
        }
    }
}

/// Canonical SMILES of a completion block, with a `*` on each label it
/// leaves open.
fn core_key(completion: &str) -> Option<String> {
    let parsed = parse_smiles_with(completion, ParseOptions::prefix()).ok()?;
    let (mut atoms, mut bonds) = (parsed.graph.atoms().to_vec(), parsed.graph.bonds().to_vec());
    for open in &parsed.open_rings {
        atoms.push(Atom::wildcard());
        bonds.push(Bond::new(open.atom, atoms.len() - 1, open.order.unwrap_or(BondOrder::Single)));
    }
    wildcard_key(&MolecularGraph::new(atoms, bonds).ok()?).ok()
}

/// Checks a full text against a prompt: it must extend the prefix, decode
/// with every label closed, contain the constraint and satisfy the
/// task-specific shape rules.
pub fn verify_completion(prompt: &TaskPrompt, full_text: &str) -> Result<Verdict, GenlabError> {
    let completion = full_text.strip_prefix(prompt.prefix.as_str()).ok_or(GenlabError::PrefixMismatch)?;
    let reject = |r| Ok(Verdict::Rejected(r));
    let mol = match decode_safe(full_text) {
        Ok(mol) => mol,
        Err(CodecError::OpenAttachment { label }) => return reject(RejectReason::OpenLabel(label)),
        Err(e) => return reject(RejectReason::Undecodable(e.to_string())),
    };
    let closed: BTreeSet<u16> = pretokenize_lenient(completion).into_iter().filter_map(ring_label).collect();
    if let Some(&label) = prompt.open_labels.iter().find(|l| !closed.contains(l)) {
        return reject(RejectReason::OpenLabel(label));
    }
    if !prompt.constraint.is_empty() && !has_substructure(&prompt.constraint, &mol, Some(Element::WILDCARD)) {
        return reject(RejectReason::MissingConstraint);
    }
    match prompt.task {
        Task::LinkerDesign if split_blocks(completion).len() != 1 => reject(RejectReason::NotSingleLinker),
        Task::ScaffoldMorphing => {
            if mol.components().len() != 1 {
                return reject(RejectReason::Disconnected);
            }
            match &prompt.reference_core {
                Some(reference) if core_key(completion).as_ref() == Some(reference) => {
                    reject(RejectReason::SameAsReference)
                }
                _ => Ok(Verdict::Accepted),
            }
        }
        _ => Ok(Verdict::Accepted),
    }
}
