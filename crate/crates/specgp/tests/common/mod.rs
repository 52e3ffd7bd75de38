#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use specgp_core::{BandSchema, Label};

/// Six-band pixels whose classes differ only in the normalized difference of
/// bands `i` and `j`: +0.5 for class A, -0.5 for class B. Every band then
/// gets Gaussian noise with sd 0.05.
pub fn planted_samples<R: Rng>(
    rng: &mut R,
    per_class: usize,
    i: usize,
    j: usize,
) -> Vec<(Vec<f64>, Label)> {
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut out = Vec::with_capacity(2 * per_class);
    for n in 0..2 * per_class {
        let label = if n % 2 == 0 { Label::A } else { Label::B };
        let nd = if label == Label::A { 0.5 } else { -0.5 };
        let mut px: Vec<f64> = (0..6).map(|_| rng.gen_range(0.05..0.5)).collect();
        let s = rng.gen_range(0.3..1.0);
        px[i] = s * (1.0 + nd) / 2.0;
        px[j] = s * (1.0 - nd) / 2.0;
        for v in &mut px {
            *v += noise.sample(rng);
        }
        out.push((px, label));
    }
    out
}

/// A CSV row: area, month, label text, bands.
pub type Row = (String, String, String, Vec<f64>);

pub fn write_pixel_csv(path: &Path, schema: &BandSchema, rows: &[Row]) {
    let mut s = String::from("area_id,year_month,label");
    for b in schema.bands() {
        write!(s, ",{}", b.name).unwrap();
    }
    s.push('\n');
    for (area, month, label, bands) in rows {
        write!(s, "{area},{month},{label}").unwrap();
        for v in bands {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    std::fs::write(path, s).unwrap();
}

pub fn month(offset: usize) -> String {
    format!("{:04}-{:02}", 2000 + offset / 12, offset % 12 + 1)
}

/// Spreads samples over `months` consecutive months, one area per sample.
pub fn samples_to_rows(samples: &[(Vec<f64>, Label)], months: usize) -> Vec<Row> {
    samples
        .iter()
        .enumerate()
        .map(|(k, (px, l))| {
            let label = if *l == Label::A { "forest" } else { "savanna" };
            (
                format!("p{k}"),
                month(k % months),
                label.to_string(),
                px.clone(),
            )
        })
        .collect()
}

/// Monthly series for `per_class` areas per class over `months` months.
/// Class B has a higher NIR level; every band gets small noise. Month `m`
/// of area `a` is skipped when `(a + m) % 7 == 3`, leaving interior gaps.
pub fn series_rows<R: Rng>(rng: &mut R, per_class: usize, months: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    for a in 0..2 * per_class {
        let b = a % 2 == 1;
        for m in 0..months {
            if (a + m) % 7 == 3 {
                continue;
            }
            let season = (m as f64 * std::f64::consts::PI / 6.0).sin() * 0.05;
            let mut px: Vec<f64> = (0..6).map(|_| 0.2 + rng.gen_range(-0.01..0.01)).collect();
            px[3] = if b { 0.6 } else { 0.3 } + season + rng.gen_range(-0.01..0.01);
            rows.push((
                format!("area{a}"),
                month(m),
                if b { "savanna" } else { "forest" }.to_string(),
                px,
            ));
        }
    }
    rows
}
