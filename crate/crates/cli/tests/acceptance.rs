//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the report is printed on every run.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use safe_cli::{run_convert, Command, JobConfig};
use safe_core::chem::{
    canonical_smiles, is_isomorphic, match_substructure, parse_smiles, Element, MolecularGraph,
};
use safe_core::codec::{decode_safe, encode_safe, randomize_safe, SafeString};
use safe_core::fragment::{default_rules, louvain, modularity};
use safe_core::genlab::{
    complete_prefix, evaluate_set, make_prompt, reward_for_value, train_ngram, PromptInput, RewardSpec, Task,
};
use safe_core::tokenizer::{encode_tokens, pretokenize, ring_label, train_bpe};

struct Outcome {
    passed: bool,
    detail: String,
}

fn corpus() -> Vec<String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus.smi");
    fs::read_to_string(path).expect("bundled corpus").lines().map(str::to_string).collect()
}

fn encoded_corpus(smiles: &[String]) -> Vec<(MolecularGraph, SafeString, safe_core::codec::EncodeReport)> {
    let rules = default_rules();
    smiles
        .iter()
        .map(|s| {
            let mol = parse_smiles(s).expect("corpus molecules parse");
            let (safe, report) = encode_safe(&mol, &rules, true).expect("corpus molecules encode");
            (mol, safe, report)
        })
        .collect()
}

fn within(limit: Option<Duration>, elapsed: Duration) -> bool {
    limit.is_none_or(|l| elapsed <= l)
}

// 1
fn safe_is_smiles(smiles: &[String]) -> Outcome {
    let encoded = encoded_corpus(smiles);
    let failures = encoded.iter().filter(|(_, s, _)| parse_smiles(s.as_str()).is_err()).count();
    Outcome {
        passed: failures == 0 && encoded.len() == 1000,
        detail: format!("{} SAFE strings, {failures} failed to parse", encoded.len()),
    }
}

// 2
fn round_trip(smiles: &[String]) -> Outcome {
    let encoded = encoded_corpus(smiles);
    let failures = encoded
        .iter()
        .filter(|(mol, safe, _)| match decode_safe(safe.as_str()) {
            Ok(back) => canonical_smiles(&back) != canonical_smiles(mol) || !is_isomorphic(&back, mol),
            Err(_) => true,
        })
        .count();
    Outcome {
        passed: failures == 0,
        detail: format!("{} molecules, {failures} round-trip mismatches", encoded.len()),
    }
}

// 3
fn permutation_invariance(smiles: &[String]) -> Outcome {
    let encoded = encoded_corpus(smiles);
    let mut failures = 0;
    let mut checked = 0;
    for (i, (mol, safe, _)) in encoded.iter().enumerate() {
        let expected = canonical_smiles(mol);
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        for seed in 0..5u64 {
            let mut blocks: Vec<&str> = safe.as_str().split('.').collect();
            blocks.shuffle(&mut rng);
            let texts = [
                blocks.join("."),
                randomize_safe(safe.as_str(), seed, false).map(|s| s.text).unwrap_or_default(),
                randomize_safe(safe.as_str(), seed, true).map(|s| s.text).unwrap_or_default(),
            ];
            for text in texts {
                checked += 1;
                if decode_safe(&text).map(|m| canonical_smiles(&m)).ok().as_ref() != Some(&expected) {
                    failures += 1;
                }
            }
        }
    }
    Outcome {
        passed: failures == 0,
        detail: format!("{checked} shuffled/randomized SAFE strings, {failures} decoded differently"),
    }
}

/// Highest ring-closure number outside bracket atoms.
fn highest_digit(smiles: &str) -> u16 {
    pretokenize(smiles).unwrap().into_iter().filter_map(ring_label).max().unwrap_or(0)
}

/// Heavy atoms in a block: atom tokens other than hydrogen and `*`.
fn heavy_atoms(block: &str) -> usize {
    pretokenize(block)
        .unwrap()
        .into_iter()
        .filter(|t| {
            let body = t.trim_start_matches('[').trim_start_matches(|c: char| c.is_ascii_digit());
            let first = body.chars().next().unwrap_or(' ');
            let is_atom = t.starts_with('[') || first.is_ascii_alphabetic();
            let is_hydrogen = t.starts_with('[') && first == 'H' && !body[1..].starts_with(|c: char| c.is_ascii_lowercase());
            is_atom && !is_hydrogen && first != '*'
        })
        .count()
}

// 4
fn numbering(smiles: &[String]) -> Outcome {
    let encoded = encoded_corpus(smiles);
    let mut failures = 0;
    for (mol, safe, report) in &encoded {
        let max = highest_digit(&canonical_smiles(mol));
        let first_label_ok = safe.attachment_digits.first().is_none_or(|&d| d == max + 1);
        let heavy: Vec<usize> = safe.as_str().split('.').map(heavy_atoms).collect();
        let sorted = heavy.windows(2).all(|w| w[0] >= w[1]);
        if report.first_attachment_digit != max + 1 || !first_label_ok || !sorted {
            failures += 1;
        }
    }
    Outcome {
        passed: failures == 0,
        detail: format!("{} encodings, {failures} violate digit start or block order", encoded.len()),
    }
}

fn prompt_specs() -> Vec<(Task, PromptInput)> {
    let single = |task, mols: &[&str]| (task, PromptInput::new(mols));
    let mut specs = Vec::new();
    for m in ["[*]c1ccc([*])cc1", "[*]c1ccncc1", "[*]C1CCN([*])CC1", "[*]c1ccc2ccccc2c1", "O=C1CCC([*])N1"] {
        specs.push(single(Task::ScaffoldDecoration, &[m]));
    }
    for m in ["[*]C(=O)Nc1ccccc1", "[*]c1ccsc1", "[*]N1CCOCC1", "[*]c1cn[nH]c1", "[*]Cc1ccccc1"] {
        specs.push(single(Task::MotifExtension, &[m]));
    }
    let pairs = [
        ["[*]c1ccccc1", "[*]N1CCOCC1"],
        ["[*]C", "[*]c1ccncc1"],
        ["[*]c1ccsc1", "[*]C(=O)O"],
        ["[*]C1CC1", "[*]c1ccccc1"],
        ["[*]N(C)C", "[*]c1ccc2[nH]ccc2c1"],
    ];
    for pair in pairs {
        specs.push(single(Task::LinkerDesign, &pair));
        let mut morph = PromptInput::new(&pair);
        morph.reference = Some("[*]c1ccc([*])cc1".into());
        specs.push((Task::ScaffoldMorphing, morph));
    }
    for (i, (m, k)) in [("c1ccccc1", 1), ("c1ccncc1", 2), ("C1CCNCC1", 1), ("c1ccc2[nH]ccc2c1", 1), ("C1CCOCC1", 2)]
        .into_iter()
        .enumerate()
    {
        let mut input = PromptInput::new(&[m]);
        input.sites = k;
        input.seed = i as u64;
        specs.push((Task::Superstructure, input));
    }
    specs
}

// 5
fn constraint_satisfaction(smiles: &[String]) -> Outcome {
    let safes: Vec<String> = encoded_corpus(smiles).into_iter().map(|(_, s, _)| s.text).collect();
    let streams: Vec<Vec<&str>> = safes.iter().map(|s| pretokenize(s).unwrap()).collect();
    let vocab = train_bpe(&streams, 400).unwrap();
    let ids: Vec<Vec<u32>> = safes.iter().map(|s| encode_tokens(s, &vocab, false).tokens).collect();
    let model = train_ngram(&ids, &vocab, 4).unwrap();

    let mut per_task: HashMap<Task, (usize, usize)> = HashMap::new();
    let (mut accepted, mut bad_constraint, mut open_labels) = (0, 0, 0);
    let specs = prompt_specs();
    for (i, (task, input)) in specs.iter().enumerate() {
        let prompt = make_prompt(*task, input).unwrap();
        let completions = complete_prefix(&model, &prompt, 100, i as u64, 96, 1.0).unwrap();
        let entry = per_task.entry(*task).or_default();
        entry.0 += completions.len();
        for c in completions.iter().filter(|c| c.verdict.is_accepted()) {
            accepted += 1;
            entry.1 += 1;
            let Ok(mol) = decode_safe(&c.text) else {
                open_labels += 1;
                continue;
            };
            if match_substructure(&prompt.constraint, &mol, Some(Element::WILDCARD)).map_or(true, |m| m.is_empty()) {
                bad_constraint += 1;
            }
            let mut counts: HashMap<u16, usize> = HashMap::new();
            for t in pretokenize(&c.text).unwrap() {
                if let Some(l) = ring_label(t) {
                    *counts.entry(l).or_default() += 1;
                }
            }
            if counts.values().any(|n| n % 2 == 1) {
                open_labels += 1;
            }
        }
    }
    let mut tasks: Vec<String> = Task::ALL[1..]
        .iter()
        .map(|t| {
            let (n, a) = per_task.get(t).copied().unwrap_or_default();
            format!("{t} {a}/{n}")
        })
        .collect();
    tasks.sort();
    Outcome {
        passed: accepted > 0 && bad_constraint == 0 && open_labels == 0 && specs.len() >= 5,
        detail: format!(
            "{} prompts, accepted {} ({}); {bad_constraint} accepted lack the constraint, {open_labels} have open labels",
            specs.len(),
            accepted,
            tasks.join(", ")
        ),
    }
}

fn brute_force_mappings(p: &MolecularGraph, t: &MolecularGraph) -> BTreeSet<Vec<usize>> {
    fn extend(p: &MolecularGraph, t: &MolecularGraph, map: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let i = map.len();
        if i == p.atom_count() {
            let ok = p.bonds().iter().all(|b| {
                t.bond_between(map[b.a], map[b.b])
                    .is_some_and(|tb| t.bond(tb).order == b.order)
            });
            if ok {
                out.insert(map.clone());
            }
            return;
        }
        for j in 0..t.atom_count() {
            if map.contains(&j) {
                continue;
            }
            let (pa, ta) = (p.atom(i), t.atom(j));
            if pa.element == Element::WILDCARD
                || (pa.element == ta.element && pa.aromatic == ta.aromatic && pa.formal_charge == ta.formal_charge)
            {
                map.push(j);
                extend(p, t, map, out);
                map.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    extend(p, t, &mut Vec::new(), &mut out);
    out
}

const SMALL: [&str; 36] = [
    "C", "CC", "CCC", "CCO", "C=C", "C#N", "CO", "CN", "CC(C)C", "C1CC1", "C1CCC1", "C1CCCCC1", "c1ccccc1",
    "c1ccncc1", "c1ccoc1", "Cc1ccccc1", "Oc1ccccc1", "CC(=O)O", "CC(=O)N", "C=CC=C", "OCCO", "NCCN", "C1CCOC1",
    "CC[O-]", "C[N+](C)(C)C", "C(C)(C)(C)C", "CSC", "ClCCBr", "O=C=O", "C1CC2CC1C2", "CCCCCCCC", "OC1CCCCC1",
    "*C", "*c1ccccc1", "*CC*", "*N",
];

// 6
fn matcher_oracle() -> Outcome {
    let mols: Vec<MolecularGraph> = SMALL.iter().map(|s| parse_smiles(s).unwrap()).collect();
    assert!(mols.iter().all(|m| m.atom_count() <= 8));
    let (mut pairs, mut discrepancies, mut nonempty) = (0, 0, 0);
    for p in &mols {
        for t in &mols {
            pairs += 1;
            let expected = brute_force_mappings(p, t);
            let found: BTreeSet<Vec<usize>> =
                match_substructure(p, t, Some(Element::WILDCARD)).unwrap().into_iter().collect();
            if found != expected {
                discrepancies += 1;
            }
            if !expected.is_empty() {
                nonempty += 1;
            }
        }
    }
    Outcome {
        passed: discrepancies == 0 && pairs >= 500,
        detail: format!("{pairs} pattern/target pairs ({nonempty} with matches), {discrepancies} discrepancies"),
    }
}

/// Canonical certificate of a small graph given as adjacency bitmasks:
/// colour refinement fixes an ordered cell partition, then every ordering
/// inside the cells is tried and the smallest upper-triangle code wins.
fn certificate(adj: &[u8]) -> u64 {
    let n = adj.len();
    let mut color: Vec<u64> = adj.iter().map(|a| u64::from(a.count_ones())).collect();
    for _ in 0..n {
        let sigs: Vec<(u64, Vec<u64>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = (0..n).filter(|&u| adj[v] >> u & 1 == 1).map(|u| color[u]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<u64> = sigs.iter().map(|s| distinct.binary_search(s).unwrap() as u64).collect();
        if next == color {
            break;
        }
        color = next;
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| color[v]);
    for v in order {
        match cells.last_mut() {
            Some(cell) if color[cell[0]] == color[v] => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut current: Vec<usize> = Vec::with_capacity(n);
    fn permute(cells: &mut [Vec<usize>], k: usize, current: &mut Vec<usize>, adj: &[u8], best: &mut u64) {
        if k == cells.len() {
            let mut code = 0u64;
            for i in 0..current.len() {
                for j in i + 1..current.len() {
                    code = code << 1 | u64::from(adj[current[i]] >> current[j] & 1);
                }
            }
            *best = (*best).min(code);
            return;
        }
        let len = cells[k].len();
        let heap_perm = |cell: &[usize], current: &mut Vec<usize>, cells: &mut [Vec<usize>], best: &mut u64| {
            let before = current.len();
            current.extend_from_slice(cell);
            permute(cells, k + 1, current, adj, best);
            current.truncate(before);
        };
        // all orderings of this cell
        let mut items = cells[k].clone();
        let mut c = vec![0usize; len];
        heap_perm(&items, current, cells, best);
        let mut i = 0;
        while i < len {
            if c[i] < i {
                if i % 2 == 0 {
                    items.swap(0, i);
                } else {
                    items.swap(c[i], i);
                }
                heap_perm(&items, current, cells, best);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }
    permute(&mut cells, 0, &mut current, adj, &mut best);
    best
}

/// Connected graphs up to isomorphism, by adding one vertex at a time (every
/// connected graph has a vertex whose removal keeps it connected).
fn connected_graphs(max_n: usize) -> Vec<Vec<u8>> {
    let mut level: Vec<Vec<u8>> = vec![vec![0]];
    let mut all = Vec::new();
    for n in 2..=max_n {
        let mut seen = std::collections::HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for mask in 1u8..(1u16 << (n - 1)) as u8 {
                let mut adj = g.clone();
                for (u, row) in adj.iter_mut().enumerate() {
                    if mask >> u & 1 == 1 {
                        *row |= 1 << (n - 1);
                    }
                }
                adj.push(mask);
                if seen.insert(certificate(&adj)) {
                    next.push(adj);
                }
            }
            if n == 8 && g.is_empty() {
                break;
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

/// Best modularity over all set partitions (restricted growth strings).
fn brute_force_best(n: usize, edges: &[(usize, usize)]) -> f64 {
    let m = edges.len() as f64;
    let mut degree = vec![0.0; n];
    for &(a, b) in edges {
        degree[a] += 1.0;
        degree[b] += 1.0;
    }
    let mut labels = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, eval: &mut dyn FnMut(&[usize])) {
        if i == labels.len() {
            eval(labels);
            return;
        }
        for c in 0..=max + 1 {
            labels[i] = c;
            rec(i + 1, max.max(c), labels, eval);
        }
    }
    let mut eval = |labels: &[usize]| {
        let mut internal = [0.0f64; 8];
        let mut deg = [0.0f64; 8];
        for &(a, b) in edges {
            if labels[a] == labels[b] {
                internal[labels[a]] += 1.0;
            }
        }
        for v in 0..n {
            deg[labels[v]] += degree[v];
        }
        let q: f64 = (0..n).map(|c| internal[c] / m - (deg[c] / (2.0 * m)).powi(2)).sum();
        if q > best {
            best = q;
        }
    };
    labels[0] = 0;
    rec(1, 0, &mut labels, &mut eval);
    best
}

// 7
fn louvain_quality() -> Outcome {
    let graphs = connected_graphs(8);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for adj in &graphs {
        let n = adj.len();
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).filter(move |&j| adj[i] >> j & 1 == 1).map(move |j| (i, j))).collect();
        let best = brute_force_best(n, &edges);
        let order: Vec<usize> = (0..n).collect();
        let p = louvain(n, &edges, 1.0, &order);
        let q = modularity(n, &edges, &p.community_of, 1.0);
        if q + 1e-12 < 0.95 * best {
            failures += 1;
        }
        if best > 1e-12 {
            worst = worst.min(q / best);
        }
    }
    let per_size: Vec<usize> = (2..=8).map(|k| graphs.iter().filter(|g| g.len() == k).count()).collect();
    Outcome {
        passed: failures == 0 && per_size == [1, 2, 6, 21, 112, 853, 11117],
        detail: format!(
            "{} connected graphs (per size 2..8: {per_size:?}), worst ratio {worst:.4}, {failures} below 0.95",
            graphs.len()
        ),
    }
}

// 8
fn tokenizer_losslessness(smiles: &[String]) -> Outcome {
    let safes: Vec<String> = encoded_corpus(smiles).into_iter().map(|(_, s, _)| s.text).collect();
    let mismatches = smiles
        .iter()
        .chain(&safes)
        .filter(|line| pretokenize(line).map(|t| t.concat()).as_ref() != Ok(*line))
        .count();
    let streams: Vec<Vec<&str>> = safes.iter().map(|s| pretokenize(s).unwrap()).collect();
    let a = train_bpe(&streams, 500).unwrap();
    let b = train_bpe(&streams, 500).unwrap();
    let same = a.to_vocab_file() == b.to_vocab_file() && a.to_merges_file() == b.to_merges_file();
    Outcome {
        passed: mismatches == 0 && same,
        detail: format!(
            "{} lines, {mismatches} not byte-identical; BPE runs identical: {same} ({} tokens)",
            smiles.len() + safes.len(),
            a.len()
        ),
    }
}

// 9
fn reward_formula() -> Outcome {
    let spec = RewardSpec::molecular_weight(300.0);
    let got: Vec<f64> = [0.0, 2.0, 4.0].iter().map(|d| reward_for_value(300.0 + d, &spec)).collect();
    let below = reward_for_value(296.0, &spec);
    let expected = [1.0, 0.5, 1.0 / 3.0];
    let ok = got.iter().zip(expected).all(|(g, e)| (g - e).abs() <= 1e-12) && (below - 1.0 / 3.0).abs() <= 1e-12;
    Outcome {
        passed: ok && spec.alpha == 0.5,
        detail: format!("rewards at deviations 0/2/4: {:.15} / {:.15} / {:.15}", got[0], got[1], got[2]),
    }
}

// 10
fn metric_definitions() -> Outcome {
    let a = evaluate_set(&["C", "C"], None);
    let b = evaluate_set(&["C", "not_a_molecule"], None);
    let dup_sets: [&[&str]; 3] = [&["CCO"; 3], &["c1ccccc1CC", "CCc1ccccc1", "c12ccccc1.C2C"], &["CC(=O)Nc1ccccc1"; 7]];
    let dup_diversity: Vec<f64> = dup_sets.iter().map(|s| evaluate_set(s, None).diversity).collect();
    let ok = (a.validity, a.uniqueness, a.diversity) == (1.0, 0.5, 0.0)
        && b.validity == 0.5
        && dup_diversity.iter().all(|&d| d == 0.0);
    Outcome {
        passed: ok,
        detail: format!(
            "[C,C] -> validity {} uniqueness {} diversity {}; [C,bad] -> validity {}; duplicate sets diversity {:?}",
            a.validity, a.uniqueness, a.diversity, b.validity, dup_diversity
        ),
    }
}

// 11
fn parallel_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let input = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus.smi");
    let mut outputs = Vec::new();
    for threads in [1, 8] {
        let out = dir.path().join(format!("t{threads}.safe"));
        let mut config = JobConfig::new(
            Command::Convert {
                report: None,
                chunk_size: 64,
                max_excluded_fraction: 1.0,
            },
            &input,
            &out,
        );
        config.threads = threads;
        let stats = run_convert(&config).unwrap();
        let report = fs::read(dir.path().join(format!("t{threads}.safe.report.tsv"))).unwrap();
        outputs.push((fs::read(&out).unwrap(), report, stats.n_ok));
    }
    let same = outputs[0] == outputs[1];
    Outcome {
        passed: same && outputs[0].2 == 1000,
        detail: format!("1 vs 8 threads: outputs and reports byte-identical: {same}, {} lines converted", outputs[0].2),
    }
}

fn main() {
    let smiles = corpus();
    let criteria: Vec<(&str, Option<u64>, Box<dyn Fn() -> Outcome>)> = vec![
        ("SAFE strings parse as SMILES", Some(10), Box::new(|| safe_is_smiles(&smiles))),
        ("round-trip fidelity", Some(30), Box::new(|| round_trip(&smiles))),
        ("fragment permutation invariance", Some(60), Box::new(|| permutation_invariance(&smiles))),
        ("attachment numbering and block order", None, Box::new(|| numbering(&smiles))),
        ("constraint satisfaction", Some(120), Box::new(|| constraint_satisfaction(&smiles))),
        ("matcher equals brute force", None, Box::new(matcher_oracle)),
        ("Louvain modularity quality", Some(60), Box::new(louvain_quality)),
        ("tokenizer losslessness and BPE determinism", None, Box::new(|| tokenizer_losslessness(&smiles))),
        ("reward formula", None, Box::new(reward_formula)),
        ("metric definitions", None, Box::new(metric_definitions)),
        ("parallel determinism", None, Box::new(parallel_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let limit = limit.map(Duration::from_secs);
        let passed = outcome.passed && within(limit, elapsed);
        if !passed {
            failed += 1;
        }
        let budget = limit.map(|l| format!(" < {}s", l.as_secs())).unwrap_or_default();
        println!(
            "criterion {:>2} [{}] {name}: {} ({:.2}s{budget})",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
