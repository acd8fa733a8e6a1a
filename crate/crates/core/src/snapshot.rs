//! Plain-text parameter snapshots.
//!
//! A snapshot is a sequence of records. A layer record is a header line
//! `layer <name> <out> <in> <activation>` followed by `out` row-major
//! weight lines and one bias line; a vector record is `vector <name> <len>`
//! followed by one line of values. Values print through `Display`, which
//! round-trips `f64` exactly, so save/load is bit-faithful.

use std::io::{BufRead, Write};

use crate::autoencoder::Autoencoder;
use crate::classifier::Classifier;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::nn::DenseLayer;
use crate::scalar::Scalar;

fn write_values<T: Scalar, W: Write>(w: &mut W, values: &[T]) -> Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            write!(w, " ")?;
        }
        write!(w, "{v}")?;
        first = false;
    }
    writeln!(w)?;
    Ok(())
}

pub fn write_layer<T: Scalar, W: Write>(
    w: &mut W,
    name: &str,
    layer: &DenseLayer<T>,
) -> Result<()> {
    writeln!(
        w,
        "layer {name} {} {} {}",
        layer.out_dim(),
        layer.in_dim(),
        layer.activation.name()
    )?;
    for row in layer.weights.rows_iter() {
        write_values(w, row)?;
    }
    write_values(w, &layer.bias)
}

pub fn write_vector<T: Scalar, W: Write>(w: &mut W, name: &str, values: &[T]) -> Result<()> {
    writeln!(w, "vector {name} {}", values.len())?;
    write_values(w, values)
}

/// One parsed snapshot record.
#[derive(Debug, Clone, PartialEq)]
pub enum Record<T> {
    Layer { name: String, layer: DenseLayer<T> },
    Vector { name: String, values: Vec<T> },
}

fn parse_values<T: Scalar>(line: &str, expected: usize, what: &str) -> Result<Vec<T>> {
    let values = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map(T::cast)
                .map_err(|e| Error::Parse(format!("bad value {tok:?} in {what}: {e}")))
        })
        .collect::<Result<Vec<T>>>()?;
    if values.len() != expected {
        return Err(Error::Parse(format!(
            "{what}: expected {expected} values, got {}",
            values.len()
        )));
    }
    Ok(values)
}

pub fn read_records<T: Scalar, R: BufRead>(reader: R) -> Result<Vec<Record<T>>> {
    let mut lines = reader.lines();
    let mut records = Vec::new();
    while let Some(line) = lines.next() {
        let line = line?;
        let header = line.trim();
        if header.is_empty() {
            continue;
        }
        let fields: Vec<&str> = header.split_whitespace().collect();
        match fields.first().copied() {
            Some("layer") => {
                if fields.len() != 5 {
                    return Err(Error::Parse(format!("malformed layer header {header:?}")));
                }
                let name = fields[1].to_string();
                let out_dim: usize = fields[2]
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad out dim: {e}")))?;
                let in_dim: usize = fields[3]
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad in dim: {e}")))?;
                let activation = fields[4].parse()?;
                let mut data = Vec::with_capacity(out_dim * in_dim);
                for r in 0..out_dim {
                    let row_line = lines
                        .next()
                        .ok_or_else(|| Error::Parse(format!("missing weight row {r}")))??;
                    data.extend(parse_values::<T>(&row_line, in_dim, "weight row")?);
                }
                let bias_line = lines
                    .next()
                    .ok_or_else(|| Error::Parse("missing bias line".into()))??;
                let bias = parse_values::<T>(&bias_line, out_dim, "bias")?;
                records.push(Record::Layer {
                    name,
                    layer: DenseLayer {
                        weights: Matrix::from_vec(out_dim, in_dim, data)?,
                        bias,
                        activation,
                    },
                });
            }
            Some("vector") => {
                if fields.len() != 3 {
                    return Err(Error::Parse(format!("malformed vector header {header:?}")));
                }
                let name = fields[1].to_string();
                let len: usize = fields[2]
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad vector length: {e}")))?;
                let value_line = lines
                    .next()
                    .ok_or_else(|| Error::Parse("missing vector values".into()))??;
                records.push(Record::Vector {
                    name,
                    values: parse_values::<T>(&value_line, len, "vector")?,
                });
            }
            Some(other) => {
                return Err(Error::Parse(format!("unknown record type {other:?}")));
            }
            None => unreachable!("empty lines are skipped"),
        }
    }
    Ok(records)
}

pub fn write_autoencoder<T: Scalar, W: Write>(w: &mut W, ae: &Autoencoder<T>) -> Result<()> {
    write_layer(w, "encoder", &ae.encoder)?;
    write_vector(w, "decoder_bias", &ae.decoder_bias)
}

pub fn read_autoencoder<T: Scalar, R: BufRead>(reader: R) -> Result<Autoencoder<T>> {
    let records = read_records::<T, R>(reader)?;
    let mut encoder = None;
    let mut decoder_bias = None;
    for record in records {
        match record {
            Record::Layer { name, layer } if name == "encoder" => encoder = Some(layer),
            Record::Vector { name, values } if name == "decoder_bias" => {
                decoder_bias = Some(values)
            }
            other => return Err(Error::Parse(format!("unexpected record {other:?}"))),
        }
    }
    let encoder = encoder.ok_or_else(|| Error::Parse("missing encoder layer".into()))?;
    let decoder_bias =
        decoder_bias.ok_or_else(|| Error::Parse("missing decoder_bias vector".into()))?;
    if decoder_bias.len() != encoder.in_dim() {
        return Err(Error::dim(
            encoder.in_dim(),
            decoder_bias.len(),
            "decoder_bias length",
        ));
    }
    Ok(Autoencoder {
        encoder,
        decoder_bias,
    })
}

pub fn write_classifier<T: Scalar, W: Write>(w: &mut W, clf: &Classifier<T>) -> Result<()> {
    write_layer(w, "hidden", &clf.hidden)?;
    write_layer(w, "output", &clf.output)
}

pub fn read_classifier<T: Scalar, R: BufRead>(reader: R) -> Result<Classifier<T>> {
    let records = read_records::<T, R>(reader)?;
    let mut hidden = None;
    let mut output = None;
    for record in records {
        match record {
            Record::Layer { name, layer } if name == "hidden" => hidden = Some(layer),
            Record::Layer { name, layer } if name == "output" => output = Some(layer),
            other => return Err(Error::Parse(format!("unexpected record {other:?}"))),
        }
    }
    let hidden = hidden.ok_or_else(|| Error::Parse("missing hidden layer".into()))?;
    let output = output.ok_or_else(|| Error::Parse("missing output layer".into()))?;
    if output.in_dim() != hidden.out_dim() {
        return Err(Error::dim(
            hidden.out_dim(),
            output.in_dim(),
            "output layer input width",
        ));
    }
    if output.out_dim() != 1 {
        return Err(Error::dim(1, output.out_dim(), "output layer width"));
    }
    Ok(Classifier {
        hidden,
        output,
        provenance: String::new(),
        freeze_hidden: false,
    })
}
