//! Self-describing text checkpoint: header lines `layers: n h1 c` and
//! `seed: s`, then one line per weight matrix and bias vector with a shape
//! prefix, floats rendered as shortest round-trip decimals. `load(save(m))`
//! equals `m` exactly.

use super::{AutoModel, Dense, TrainError};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub fn save_model(model: &AutoModel, path: impl AsRef<Path>) -> Result<(), TrainError> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    writeln!(
        w,
        "layers: {} {} {}",
        model.input_dim, model.hidden_dim, model.code_dim
    )?;
    writeln!(w, "seed: {}", model.seed)?;
    for (i, layer) in model.layers.iter().enumerate() {
        write!(w, "W{} {} {}", i + 1, layer.rows, layer.cols)?;
        for v in &layer.weights {
            write!(w, " {v}")?;
        }
        w.write_all(b"\n")?;
        write!(w, "b{} {}", i + 1, layer.rows)?;
        for v in &layer.biases {
            write!(w, " {v}")?;
        }
        w.write_all(b"\n")?;
    }
    write!(w, "history {}", model.history.len())?;
    for (epoch, loss) in &model.history {
        write!(w, " {epoch} {loss}")?;
    }
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn bad(line: usize, message: impl Into<String>) -> TrainError {
    TrainError::BadCheckpoint {
        line,
        message: message.into(),
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<AutoModel, TrainError> {
    let file = File::open(path.as_ref())?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let mut next_line = |expect: &str| -> Result<(usize, String), TrainError> {
        match lines.next() {
            Some((i, Ok(line))) => Ok((i + 1, line)),
            Some((i, Err(e))) => Err(bad(i + 1, e.to_string())),
            None => Err(bad(0, format!("unexpected end of file, wanted {expect}"))),
        }
    };

    let (ln, header) = next_line("layers header")?;
    let sizes: Vec<usize> = header
        .strip_prefix("layers: ")
        .ok_or_else(|| bad(ln, "expected 'layers: n h1 c'"))?
        .split_whitespace()
        .map(|v| v.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| bad(ln, e.to_string()))?;
    if sizes.len() != 3 {
        return Err(bad(ln, "expected three layer sizes"));
    }
    let (n, h1, code) = (sizes[0], sizes[1], sizes[2]);

    let (ln, seed_line) = next_line("seed header")?;
    let seed: u64 = seed_line
        .strip_prefix("seed: ")
        .ok_or_else(|| bad(ln, "expected 'seed: s'"))?
        .parse()
        .map_err(|e: std::num::ParseIntError| bad(ln, e.to_string()))?;

    let shapes = [(h1, n), (code, h1), (h1, code), (n, h1)];
    let mut layers: Vec<Dense> = Vec::with_capacity(4);
    for (i, &(rows, cols)) in shapes.iter().enumerate() {
        let (ln, wline) = next_line("weight matrix")?;
        let weights = parse_row(&wline, &format!("W{}", i + 1), &[rows, cols], rows * cols)
            .map_err(|m| bad(ln, m))?;
        let (ln, bline) = next_line("bias vector")?;
        let biases =
            parse_row(&bline, &format!("b{}", i + 1), &[rows], rows).map_err(|m| bad(ln, m))?;
        layers.push(Dense {
            rows,
            cols,
            weights,
            biases,
        });
    }

    let (ln, hline) = next_line("history")?;
    let mut fields = hline.split_whitespace();
    if fields.next() != Some("history") {
        return Err(bad(ln, "expected history line"));
    }
    let count: usize = fields
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(ln, "bad history count"))?;
    let mut history = Vec::with_capacity(count);
    for _ in 0..count {
        let epoch: usize = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(ln, "truncated history"))?;
        let loss: f64 = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(ln, "truncated history"))?;
        history.push((epoch, loss));
    }

    let layers: [Dense; 4] = layers.try_into().expect("exactly four layers parsed");
    Ok(AutoModel {
        layers,
        input_dim: n,
        hidden_dim: h1,
        code_dim: code,
        seed,
        history,
    })
}

fn parse_row(line: &str, tag: &str, shape: &[usize], len: usize) -> Result<Vec<f64>, String> {
    let mut fields = line.split_whitespace();
    if fields.next() != Some(tag) {
        return Err(format!("expected line tagged '{tag}'"));
    }
    for &dim in shape {
        let got: usize = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("missing shape for {tag}"))?;
        if got != dim {
            return Err(format!("{tag} shape {got} does not match header {dim}"));
        }
    }
    let values: Vec<f64> = fields
        .map(|v| v.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if values.len() != len {
        return Err(format!(
            "{tag} has {} values, expected {len}",
            values.len()
        ));
    }
    Ok(values)
}
