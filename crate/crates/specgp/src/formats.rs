//! Index and population files.
//!
//! An index file names its schema, optionally records the fitness, then
//! holds one formula:
//!
//! ```text
//! schema: landsat
//! fitness: 6.41
//! (NIR - Red) % (NIR + Red)
//! ```
//!
//! A population file has the same `schema:` header followed by one
//! `fitness<TAB>formula` line per individual; `-` marks an unscored one.
//! Blank lines and `#` comments are allowed in both.

use std::path::Path;

use specgp_core::engine::Individual;
use specgp_core::expr::{parse_formula, to_formula};
use specgp_core::{BandSchema, ExprTree};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IndexFile {
    pub schema: BandSchema,
    pub fitness: Option<f64>,
    pub tree: ExprTree,
}

pub fn render_index(schema: &BandSchema, tree: &ExprTree, fitness: Option<f64>) -> String {
    let mut s = format!("schema: {}\n", schema.sensor());
    if let Some(f) = fitness {
        s.push_str(&format!("fitness: {f}\n"));
    }
    s.push_str(&to_formula(tree, schema));
    s.push('\n');
    s
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header_field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = line.split_once(':')?;
    (k.trim() == key).then(|| v.trim())
}

fn parse_schema_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<BandSchema, String> {
    let (n, first) = lines.next().ok_or("empty file")?;
    let name = header_field(first, "schema")
        .ok_or(format!("line {n}: expected `schema: <name>` header"))?;
    BandSchema::builtin(name).map_err(|e| format!("line {n}: {e}"))
}

pub fn parse_index(text: &str) -> Result<IndexFile, String> {
    let mut it = content_lines(text);
    let schema = parse_schema_line(&mut it)?;
    let mut fitness = None;
    let mut formula = None;
    for (n, line) in it {
        if let Some(v) = header_field(line, "fitness") {
            fitness = Some(
                v.parse::<f64>()
                    .map_err(|_| format!("line {n}: bad fitness `{v}`"))?,
            );
        } else if formula.is_some() {
            return Err(format!("line {n}: more than one formula"));
        } else {
            let tree = parse_formula(line, &schema).map_err(|e| format!("line {n}: {e}"))?;
            formula = Some(tree);
        }
    }
    let tree = formula.ok_or("no formula line")?;
    Ok(IndexFile {
        schema,
        fitness,
        tree,
    })
}

pub fn read_index(path: &Path) -> Result<IndexFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_index(&text).map_err(|m| CliError::input(path, m))
}

pub fn render_population(schema: &BandSchema, population: &[Individual]) -> String {
    let mut s = format!("schema: {}\n# fitness\tformula\n", schema.sensor());
    for ind in population {
        let f = ind.fitness.map_or("-".to_string(), |f| f.to_string());
        s.push_str(&format!("{f}\t{}\n", to_formula(&ind.tree, schema)));
    }
    s
}

pub fn parse_population(text: &str) -> Result<(BandSchema, Vec<Individual>), String> {
    let mut it = content_lines(text);
    let schema = parse_schema_line(&mut it)?;
    let mut population = Vec::new();
    for (n, line) in it {
        let (f, formula) = line
            .split_once('\t')
            .ok_or(format!("line {n}: expected `fitness<TAB>formula`"))?;
        let tree = parse_formula(formula, &schema).map_err(|e| format!("line {n}: {e}"))?;
        let fitness = match f.trim() {
            "-" => None,
            v => Some(
                v.parse::<f64>()
                    .map_err(|_| format!("line {n}: bad fitness `{v}`"))?,
            ),
        };
        population.push(Individual { tree, fitness });
    }
    if population.is_empty() {
        return Err("no individuals".into());
    }
    Ok((schema, population))
}

pub fn read_population(path: &Path) -> Result<(BandSchema, Vec<Individual>)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_population(&text).map_err(|m| CliError::input(path, m))
}
