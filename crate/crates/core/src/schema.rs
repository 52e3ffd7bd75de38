//! Named band sets for a sensor family.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("schema `{schema}` has no band named `{band}`")]
    MissingBand { schema: String, band: String },
    #[error("duplicate band name `{0}`")]
    DuplicateBand(String),
    #[error("schema must contain at least one band")]
    Empty,
    #[error("unknown schema `{0}` (expected `landsat` or `modis`)")]
    UnknownSchema(String),
}

/// One spectral band: a name, its wavelength range in micrometres and the
/// sensor's band code.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub name: String,
    pub wavelength_um: (f64, f64),
    pub code: Option<String>,
}

impl Band {
    pub fn new(name: &str, wavelength_um: (f64, f64), code: Option<&str>) -> Self {
        Band {
            name: name.to_string(),
            wavelength_um,
            code: code.map(ToString::to_string),
        }
    }
}

/// An ordered set of uniquely named bands. A band's position is the index a
/// [`crate::ExprTree`] band terminal refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSchema {
    sensor: String,
    bands: Vec<Band>,
}

impl BandSchema {
    pub fn new(sensor: &str, bands: Vec<Band>) -> Result<Self, SchemaError> {
        if bands.is_empty() {
            return Err(SchemaError::Empty);
        }
        for (i, b) in bands.iter().enumerate() {
            if bands[..i].iter().any(|other| other.name == b.name) {
                return Err(SchemaError::DuplicateBand(b.name.clone()));
            }
        }
        Ok(BandSchema {
            sensor: sensor.to_string(),
            bands,
        })
    }

    /// Landsat 5 TM / 7 ETM+ surface reflectance bands (no thermal band).
    pub fn landsat() -> Self {
        let bands = [
            ("Blue", (0.45, 0.52), "B1"),
            ("Green", (0.52, 0.60), "B2"),
            ("Red", (0.63, 0.69), "B3"),
            ("NIR", (0.76, 0.90), "B4"),
            ("SWIR", (1.55, 1.75), "B5"),
            ("SWIR2", (2.08, 2.35), "B7"),
        ];
        Self::from_table("landsat", &bands)
    }

    /// MODIS MOD09A1/MYD09A1 bands 1-7, in spectral order.
    pub fn modis() -> Self {
        let bands = [
            ("Blue", (0.46, 0.48), "B3"),
            ("Green", (0.55, 0.57), "B4"),
            ("Red", (0.62, 0.67), "B1"),
            ("NIR", (0.84, 0.88), "B2"),
            ("NIR2", (1.23, 1.25), "B5"),
            ("SWIR", (1.63, 1.65), "B6"),
            ("SWIR2", (2.11, 2.16), "B7"),
        ];
        Self::from_table("modis", &bands)
    }

    /// Looks up a built-in schema by its lowercase name.
    pub fn builtin(name: &str) -> Result<Self, SchemaError> {
        match name {
            "landsat" => Ok(Self::landsat()),
            "modis" => Ok(Self::modis()),
            other => Err(SchemaError::UnknownSchema(other.to_string())),
        }
    }

    fn from_table(sensor: &str, rows: &[(&str, (f64, f64), &str)]) -> Self {
        let bands = rows
            .iter()
            .map(|&(name, wl, code)| Band::new(name, wl, Some(code)))
            .collect();
        BandSchema {
            sensor: sensor.to_string(),
            bands,
        }
    }

    pub fn sensor(&self) -> &str {
        &self.sensor
    }

    pub fn arity(&self) -> usize {
        self.bands.len()
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn band(&self, index: usize) -> Option<&Band> {
        self.bands.get(index)
    }

    pub fn band_name(&self, index: usize) -> Option<&str> {
        self.bands.get(index).map(|b| b.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.bands.iter().position(|b| b.name == name)
    }

    /// Like [`Self::index_of`] but reports the missing band as an error.
    pub fn require(&self, name: &str) -> Result<usize, SchemaError> {
        self.index_of(name).ok_or_else(|| SchemaError::MissingBand {
            schema: self.sensor.clone(),
            band: name.to_string(),
        })
    }
}
