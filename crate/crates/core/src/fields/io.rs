use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::field::Field;
use crate::algebra::{Mat, Vec3};
use crate::error::{Error, Result};

/// Node value that can be flattened into CSV columns.
pub trait CsvValue: Copy {
    fn columns(sample: &Self) -> Vec<String>;
    fn flatten(&self, out: &mut Vec<f64>);
}

impl CsvValue for f64 {
    fn columns(_: &Self) -> Vec<String> {
        vec!["value".into()]
    }
    fn flatten(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }
}

impl CsvValue for C64 {
    fn columns(_: &Self) -> Vec<String> {
        vec!["re".into(), "im".into()]
    }
    fn flatten(&self, out: &mut Vec<f64>) {
        out.extend([self.re, self.im]);
    }
}

impl CsvValue for Vec3 {
    fn columns(_: &Self) -> Vec<String> {
        vec!["v1".into(), "v2".into(), "v3".into()]
    }
    fn flatten(&self, out: &mut Vec<f64>) {
        out.extend(self.0);
    }
}

impl CsvValue for Mat {
    fn columns(sample: &Self) -> Vec<String> {
        let d = sample.dim();
        let mut cols = Vec::with_capacity(2 * d * d);
        for i in 1..=d {
            for j in 1..=d {
                cols.push(format!("m{i}{j}_re"));
                cols.push(format!("m{i}{j}_im"));
            }
        }
        cols
    }
    fn flatten(&self, out: &mut Vec<f64>) {
        for z in self.entries() {
            out.extend([z.re, z.im]);
        }
    }
}

/// Writes one row per node: coordinates, then the flattened value.
pub fn write_csv<T: CsvValue, W: Write>(field: &Field<T>, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let spec = field.spec();
    let mut header: Vec<String> = spec.names().iter().map(|s| s.to_string()).collect();
    if let Some(v) = field.values().first() {
        header.extend(T::columns(v));
    }
    wr.write_record(&header)?;
    let mut row = Vec::new();
    for (n, v) in field.values().iter().enumerate() {
        row.clear();
        row.extend(spec.coords(n));
        v.flatten(&mut row);
        wr.write_record(row.iter().map(|x| format!("{x:?}")))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(field: &Field<T>, w: W) -> Result<()> {
    serde_json::to_writer(w, field)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned + Copy, R: Read>(r: R) -> Result<Field<T>> {
    let f: Field<T> = serde_json::from_reader(r)?;
    // re-validate the node count, which derive(Deserialize) does not check
    let spec = f.spec().clone();
    Field::new(spec, f.into_values())
}

pub fn to_json_string<T: Serialize>(field: &Field<T>) -> Result<String> {
    serde_json::to_string(field).map_err(Error::from)
}
