//! Seeded synthetic corpora with planted, recurring bug patterns.
//!
//! Buggy commits belong to a fixed number of bug families. Every member of a
//! family adds the family's long buggy statement (with one literal varied)
//! among a few short statements of its own, so later members are
//! near-duplicates of earlier ones and the buggy line is known. Clean commits
//! draw ordinary statements from a shared project vocabulary.

use std::collections::{BTreeMap, HashSet};

use bugmatch_core::{Change, Commit, Label};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::eval::SECONDS_PER_DAY;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub commits: usize,
    pub days: u32,
    pub buggy_fraction: f64,
    pub families: usize,
    pub start_ts: i64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            commits: 2000,
            days: 730,
            buggy_fraction: 0.15,
            families: 25,
            start_ts: 1_577_836_800,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    /// Oldest first.
    pub commits: Vec<Commit>,
    /// Bug family of every buggy commit.
    pub family: BTreeMap<String, usize>,
}

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ver", "tan", "qu", "zor", "pel", "rix", "bo", "den", "sul", "fa", "gri", "hom",
    "jat", "nu", "op", "wex", "yl", "cra", "dru", "ste", "vo", "mar", "lin", "tek", "sa", "po", "ri",
];

fn word(rng: &mut ChaCha8Rng, parts: usize) -> String {
    (0..parts).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

fn camel(rng: &mut ChaCha8Rng) -> String {
    let head = word(rng, 2);
    let mut tail = word(rng, 2);
    tail[..1].make_ascii_uppercase();
    head + &tail
}

struct Family {
    slots: [String; 9],
}

impl Family {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        Family {
            slots: std::array::from_fn(|_| camel(rng)),
        }
    }

    fn planted_line(&self, literal: u32) -> String {
        let [buf, len, cap, check, flags, mask, release, data, size] = &self.slots;
        format!(
            "if ({buf}->{len} > {cap} && !{check}({buf}, {flags} | {mask})) {{ {release}({buf}->{data}, {size} + {literal}); {buf}->{len} = {cap}; }}"
        )
    }
}

struct Vocabulary {
    words: Vec<String>,
    types: Vec<&'static str>,
}

impl Vocabulary {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        Vocabulary {
            words: (0..240).map(|_| camel(rng)).collect(),
            types: vec!["int", "long", "auto", "size_t", "bool", "double"],
        }
    }

    fn w<'a>(&'a self, rng: &mut ChaCha8Rng) -> &'a str {
        self.words.choose(rng).unwrap()
    }

    /// An ordinary statement of at least four code tokens.
    fn statement(&self, rng: &mut ChaCha8Rng) -> String {
        let ty = *self.types.choose(rng).unwrap();
        match rng.gen_range(0..6) {
            0 => format!("{ty} {} = {}.{}({});", self.w(rng), self.w(rng), self.w(rng), self.w(rng)),
            1 => format!("for (int i = 0; i < {}.size(); ++i) {{", self.w(rng)),
            2 => format!("return {} + {} * {};", self.w(rng), self.w(rng), rng.gen_range(1..64)),
            3 => format!("log.info(\"{} {}\", {});", self.w(rng), self.w(rng), self.w(rng)),
            4 => format!("{}.{}({}, {});", self.w(rng), self.w(rng), self.w(rng), rng.gen_range(0..10)),
            _ => format!("while ({} < {}) {{ {}--; }}", self.w(rng), self.w(rng), self.w(rng)),
        }
    }

    /// A statement of at most three code tokens: it yields no shingles.
    fn short_statement(&self, rng: &mut ChaCha8Rng) -> String {
        match rng.gen_range(0..3) {
            0 => format!("{}++;", self.w(rng)),
            1 => format!("return {};", self.w(rng)),
            _ => format!("delete {};", self.w(rng)),
        }
    }
}

fn hash(rng: &mut ChaCha8Rng) -> String {
    let bytes: [u8; 20] = rng.gen();
    hex::encode(bytes)
}

const DIRS: &[&str] = &["src/net", "src/io", "src/core", "lib/util", "tools"];

fn path(rng: &mut ChaCha8Rng) -> String {
    format!("{}/{}.cc", DIRS.choose(rng).unwrap(), word(rng, 3))
}

pub fn generate(params: &SynthParams) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let vocab = Vocabulary::new(&mut rng);
    let families: Vec<Family> = (0..params.families.max(1)).map(|_| Family::new(&mut rng)).collect();

    let span = i64::from(params.days) * SECONDS_PER_DAY;
    let mut timestamps: Vec<i64> = (0..params.commits)
        .map(|_| params.start_ts + rng.gen_range(0..span))
        .collect();
    timestamps.sort_unstable();

    let n_buggy = (params.commits as f64 * params.buggy_fraction).round() as usize;
    let mut order: Vec<usize> = (0..params.commits).collect();
    order.shuffle(&mut rng);
    let buggy: HashSet<usize> = order[..n_buggy.min(params.commits)].iter().copied().collect();

    let mut seen_hashes = HashSet::new();
    let mut commits = Vec::with_capacity(params.commits);
    let mut family_of = BTreeMap::new();
    let mut bug_count = 0;
    for (i, &ts) in timestamps.iter().enumerate() {
        let h = loop {
            let h = hash(&mut rng);
            if seen_hashes.insert(h.clone()) {
                break h;
            }
        };
        let mut changes = Vec::new();
        let label = if buggy.contains(&i) {
            let fam = bug_count % families.len();
            bug_count += 1;
            family_of.insert(h.clone(), fam);

            let context = rng.gen_range(1..=5);
            let at = rng.gen_range(0..=context);
            let mut lines: Vec<String> = (0..context).map(|_| vocab.short_statement(&mut rng)).collect();
            lines.insert(at, families[fam].planted_line(rng.gen_range(1..4)));
            let mut change = Change::new(h.clone(), path(&mut rng), lines, vec![], Label::Buggy);
            change.buggy_lines = vec![at as u32];
            changes.push(change);
            if rng.gen_bool(0.5) {
                let lines = (0..rng.gen_range(1..=6)).map(|_| vocab.short_statement(&mut rng)).collect();
                changes.push(Change::new(h.clone(), path(&mut rng), lines, vec![], Label::Buggy));
            }
            Label::Buggy
        } else {
            for _ in 0..rng.gen_range(1..=2) {
                let lines = (0..rng.gen_range(1..=6)).map(|_| vocab.statement(&mut rng)).collect();
                let deleted = (0..rng.gen_range(0..=2)).map(|_| vocab.statement(&mut rng)).collect();
                changes.push(Change::new(h.clone(), path(&mut rng), lines, deleted, Label::Clean));
            }
            Label::Clean
        };
        // one document per file
        changes.sort_by(|a, b| a.file_path.cmp(&b.file_path));
        changes.dedup_by(|a, b| a.file_path == b.file_path);
        commits.push(Commit::new(h, ts, label, changes));
    }
    SynthCorpus {
        commits,
        family: family_of,
    }
}
