//! Baseline vegetation indices, built in the same tree algebra as learned
//! indices so every downstream code path treats them alike.
//!
//! Division is protected, so at a zero denominator these return `1.0` where
//! the textbook formulas are undefined.

use alloc::string::{String, ToString};

use crate::expr::ExprTree;
use crate::schema::{BandSchema, SchemaError};

/// `(NIR - Red) % (NIR + Red)`
pub fn ndvi(schema: &BandSchema) -> Result<ExprTree, SchemaError> {
    let nir = schema.require("NIR")?;
    let red = schema.require("Red")?;
    Ok(ExprTree::pdiv(
        ExprTree::sub(ExprTree::band(nir), ExprTree::band(red)),
        ExprTree::add(ExprTree::band(nir), ExprTree::band(red)),
    ))
}

/// `2.5 (NIR - Red) % (NIR + 6 Red - 7.5 Blue + 1)`
pub fn evi(schema: &BandSchema) -> Result<ExprTree, SchemaError> {
    let nir = schema.require("NIR")?;
    let red = schema.require("Red")?;
    let blue = schema.require("Blue")?;
    let denom = ExprTree::add(
        ExprTree::sub(
            ExprTree::add(
                ExprTree::band(nir),
                ExprTree::mul(ExprTree::constant(6.0), ExprTree::band(red)),
            ),
            ExprTree::mul(ExprTree::constant(7.5), ExprTree::band(blue)),
        ),
        ExprTree::constant(1.0),
    );
    Ok(ExprTree::pdiv(scaled_difference(nir, red), denom))
}

/// `2.5 (NIR - Red) % (NIR + 2.4 Red + 1)`
pub fn evi2(schema: &BandSchema) -> Result<ExprTree, SchemaError> {
    let nir = schema.require("NIR")?;
    let red = schema.require("Red")?;
    let denom = ExprTree::add(
        ExprTree::add(
            ExprTree::band(nir),
            ExprTree::mul(ExprTree::constant(2.4), ExprTree::band(red)),
        ),
        ExprTree::constant(1.0),
    );
    Ok(ExprTree::pdiv(scaled_difference(nir, red), denom))
}

fn scaled_difference(nir: usize, red: usize) -> ExprTree {
    ExprTree::mul(
        ExprTree::constant(2.5),
        ExprTree::sub(ExprTree::band(nir), ExprTree::band(red)),
    )
}

/// The built-in sensor schemas.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinSchemas {
    pub landsat: BandSchema,
    pub modis: BandSchema,
}

pub fn builtin_schemas() -> BuiltinSchemas {
    BuiltinSchemas {
        landsat: BandSchema::landsat(),
        modis: BandSchema::modis(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Baseline {
    Ndvi,
    Evi,
    Evi2,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Ndvi, Baseline::Evi, Baseline::Evi2];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Ndvi => "ndvi",
            Baseline::Evi => "evi",
            Baseline::Evi2 => "evi2",
        }
    }

    pub fn parse(name: &str) -> Result<Baseline, String> {
        match name.to_ascii_lowercase().as_str() {
            "ndvi" => Ok(Baseline::Ndvi),
            "evi" => Ok(Baseline::Evi),
            "evi2" => Ok(Baseline::Evi2),
            _ => Err(name.to_string()),
        }
    }

    pub fn tree(self, schema: &BandSchema) -> Result<ExprTree, SchemaError> {
        match self {
            Baseline::Ndvi => ndvi(schema),
            Baseline::Evi => evi(schema),
            Baseline::Evi2 => evi2(schema),
        }
    }
}
