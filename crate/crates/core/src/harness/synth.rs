//! Synthetic Java test corpus with a known cost model.
//!
//! Each file is a test class with helper methods and test methods built from
//! straight-line statements, helper calls, if/else blocks and counted `for`
//! loops. A file's cost is a weighted sum of its statement count, its call
//! count and, per loop, nesting depth times the literal iteration count.
//! Recorded durations are the cost times log-normal noise, several runs per
//! file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::HarnessError;

/// Milliseconds per cost unit and fixed per-file overhead.
const MS_PER_UNIT: f64 = 0.2;
const BASE_MS: f64 = 5.0;
const CALL_WEIGHT: f64 = 2.5;
const LOOP_WEIGHT: f64 = 1.0;
const RUNS_PER_FILE: usize = 3;
const NOISE_SIGMA: f64 = 0.1;
const LOOP_COUNTS: [u32; 4] = [5, 10, 20, 40];

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// `n` assignment statements.
    Stmts(usize),
    /// Call of helper `i`.
    Call(usize),
    If { then: Vec<Block>, otherwise: Vec<Block> },
    Loop { iterations: u32, body: Vec<Block> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthProgram {
    pub class_name: String,
    /// Statement count of each helper method.
    pub helpers: Vec<usize>,
    pub tests: Vec<Vec<Block>>,
}

#[derive(Debug, Default)]
struct Tally {
    statements: usize,
    calls: usize,
    /// Sum over loops of nesting depth (outermost = 1) times iterations.
    loop_work: f64,
}

fn tally(blocks: &[Block], depth: u32, t: &mut Tally) {
    for b in blocks {
        match b {
            Block::Stmts(n) => t.statements += n,
            Block::Call(_) => t.calls += 1,
            Block::If { then, otherwise } => {
                tally(then, depth, t);
                tally(otherwise, depth, t);
            }
            Block::Loop { iterations, body } => {
                t.loop_work += f64::from((depth + 1) * iterations);
                tally(body, depth + 1, t);
            }
        }
    }
}

impl SynthProgram {
    /// Cost in abstract units.
    pub fn cost(&self) -> f64 {
        let mut t = Tally {
            statements: self.helpers.iter().sum(),
            ..Tally::default()
        };
        for body in &self.tests {
            tally(body, 0, &mut t);
        }
        t.statements as f64 + CALL_WEIGHT * t.calls as f64 + LOOP_WEIGHT * t.loop_work
    }

    /// Noise-free duration in milliseconds.
    pub fn expected_ms(&self) -> f64 {
        BASE_MS + MS_PER_UNIT * self.cost()
    }

    pub fn random(class_name: &str, rng: &mut ChaCha8Rng) -> Self {
        let helpers = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(1..=5)).collect::<Vec<_>>();
        let tests = (0..rng.gen_range(1..=4))
            .map(|_| random_blocks(rng, helpers.len(), 0, 1..=5))
            .collect();
        Self {
            class_name: class_name.to_string(),
            helpers,
            tests,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "package synth;\n");
        let _ = writeln!(s, "import static org.junit.Assert.assertTrue;\n");
        let _ = writeln!(s, "import org.junit.Test;\n");
        let _ = writeln!(s, "public class {} {{", self.class_name);
        let _ = writeln!(s, "    private int acc;\n");
        for (i, &n) in self.helpers.iter().enumerate() {
            let _ = writeln!(s, "    private int helper{i}(int v) {{");
            let _ = writeln!(s, "        int r = v;");
            for k in 1..n {
                let _ = writeln!(s, "        r = r * {} + {};", k + 1, k);
            }
            let _ = writeln!(s, "        return r;");
            let _ = writeln!(s, "    }}\n");
        }
        for (t, body) in self.tests.iter().enumerate() {
            let _ = writeln!(s, "    @Test");
            let _ = writeln!(s, "    public void testCase{t}() {{");
            let _ = writeln!(s, "        int x = {t};");
            let mut vars = 0;
            render_blocks(&mut s, body, 2, &mut vars);
            let _ = writeln!(s, "        assertTrue(x != acc || acc == x);");
            let _ = writeln!(s, "    }}\n");
        }
        let _ = writeln!(s, "}}");
        s
    }
}

fn random_blocks(
    rng: &mut ChaCha8Rng,
    n_helpers: usize,
    depth: usize,
    len: std::ops::RangeInclusive<usize>,
) -> Vec<Block> {
    let len = rng.gen_range(len);
    (0..len)
        .map(|_| {
            let roll = rng.gen_range(0..100);
            if roll < 35 {
                Block::Stmts(rng.gen_range(1..=4))
            } else if roll < 50 && n_helpers > 0 {
                Block::Call(rng.gen_range(0..n_helpers))
            } else if roll < 65 && depth < 2 {
                Block::If {
                    then: random_blocks(rng, n_helpers, depth + 1, 1..=2),
                    otherwise: random_blocks(rng, n_helpers, depth + 1, 0..=2),
                }
            } else if depth < 3 {
                Block::Loop {
                    iterations: *LOOP_COUNTS.choose(rng).expect("non-empty"),
                    body: random_blocks(rng, n_helpers, depth + 1, 1..=2),
                }
            } else {
                Block::Stmts(rng.gen_range(1..=2))
            }
        })
        .collect()
}

const LOOP_VARS: [&str; 6] = ["i", "j", "k", "m", "p", "q"];

fn render_blocks(s: &mut String, blocks: &[Block], indent: usize, vars: &mut usize) {
    let pad = "    ".repeat(indent);
    for b in blocks {
        match b {
            Block::Stmts(n) => {
                for k in 0..*n {
                    let _ = writeln!(s, "{pad}x = x + {};", k + 1);
                }
            }
            Block::Call(h) => {
                let _ = writeln!(s, "{pad}acc = helper{h}(x);");
            }
            Block::If { then, otherwise } => {
                let _ = writeln!(s, "{pad}if (x > acc) {{");
                render_blocks(s, then, indent + 1, vars);
                if otherwise.is_empty() {
                    let _ = writeln!(s, "{pad}}}");
                } else {
                    let _ = writeln!(s, "{pad}}} else {{");
                    render_blocks(s, otherwise, indent + 1, vars);
                    let _ = writeln!(s, "{pad}}}");
                }
            }
            Block::Loop { iterations, body } => {
                let v = format!("{}{}", LOOP_VARS[*vars % LOOP_VARS.len()], *vars / LOOP_VARS.len());
                *vars += 1;
                let _ = writeln!(s, "{pad}for (int {v} = 0; {v} < {iterations}; {v}++) {{");
                render_blocks(s, body, indent + 1, vars);
                let _ = writeln!(s, "{pad}}}");
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthFile {
    /// Path relative to the corpus source directory.
    pub path: String,
    pub program: SynthProgram,
    pub runs_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub source_dir: std::path::PathBuf,
    pub labels_file: std::path::PathBuf,
    pub files: Vec<SynthFile>,
}

/// Builds the programs and noisy run durations without touching the disk.
pub fn synth_files(n: usize, seed: u64) -> Vec<SynthFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, NOISE_SIGMA).expect("valid sigma");
    (0..n)
        .map(|i| {
            let name = format!("Synth{i:04}Test");
            let program = SynthProgram::random(&name, &mut rng);
            let expected = program.expected_ms();
            let runs_ms = (0..RUNS_PER_FILE)
                .map(|_| {
                    let ms = expected * noise.sample(&mut rng).exp();
                    (ms * 1000.0).round() / 1000.0
                })
                .collect();
            SynthFile {
                path: format!("synth/{name}.java"),
                program,
                runs_ms,
            }
        })
        .collect()
}

/// Writes `n` synthetic test files under `out/src` and their run durations
/// to `out/labels.csv`. Identical seeds give byte-identical output.
pub fn gen_synthetic(n: usize, seed: u64, out: &Path) -> Result<SyntheticCorpus, HarnessError> {
    if n < 20 {
        return Err(HarnessError::Config(format!("synthetic corpus needs at least 20 files, got {n}")));
    }
    let files = synth_files(n, seed);
    let source_dir = out.join("src");
    let mut labels = String::from("path,duration_ms\n");
    for f in &files {
        let p = source_dir.join(&f.path);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
        fs::write(&p, f.program.render()).map_err(|e| HarnessError::io(&p, e))?;
        for r in &f.runs_ms {
            let _ = writeln!(labels, "{},{r}", f.path);
        }
    }
    let labels_file = out.join("labels.csv");
    fs::write(&labels_file, labels).map_err(|e| HarnessError::io(&labels_file, e))?;
    Ok(SyntheticCorpus {
        source_dir,
        labels_file,
        files,
    })
}
