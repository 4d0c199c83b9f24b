//! Versioned text serialization of trained models.
//!
//! Line-oriented format; every f64 is stored as the hex of its bit pattern
//! so reload is bit-exact:
//!
//! ```text
//! retcad-model v1
//! kind wnn mexican_hat        (or: kind mlp)
//! dims <input> <hidden>
//! norm <mean bits...> / <std bits...>
//! params <bits...>
//! ```

use std::io::{BufRead, Write};

use crate::error::{CadError, Result};
use crate::neural::model::{Classifier, MlpModel, Normalizer, WnnModel};
use crate::neural::wavelet::WaveletKind;

const MAGIC: &str = "retcad-model v1";

/// Either classifier, for generic persistence and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Wnn(WnnModel),
    Mlp(MlpModel),
}

impl AnyModel {
    pub fn as_classifier(&self) -> &dyn Classifier {
        match self {
            AnyModel::Wnn(m) => m,
            AnyModel::Mlp(m) => m,
        }
    }

    pub fn as_classifier_mut(&mut self) -> &mut dyn Classifier {
        match self {
            AnyModel::Wnn(m) => m,
            AnyModel::Mlp(m) => m,
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            AnyModel::Wnn(m) => format!("wnn/{}", m.kind.name()),
            AnyModel::Mlp(_) => "mlp".to_string(),
        }
    }
}

fn bits(values: &[f64]) -> String {
    values.iter().map(|v| format!("{:016x}", v.to_bits())).collect::<Vec<_>>().join(" ")
}

fn parse_bits(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|tok| {
            u64::from_str_radix(tok, 16)
                .map(f64::from_bits)
                .map_err(|_| CadError::invalid(format!("bad float bits '{tok}'")))
        })
        .collect()
}

pub fn write_model(model: &AnyModel, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    let c = model.as_classifier();
    match model {
        AnyModel::Wnn(m) => {
            writeln!(w, "kind wnn {}", m.kind.name())?;
            writeln!(w, "dims {} {}", c.input_dim(), m.hidden_units())?;
        }
        AnyModel::Mlp(m) => {
            writeln!(w, "kind mlp")?;
            writeln!(w, "dims {} {}", c.input_dim(), m.hidden_units())?;
        }
    }
    let norm = c.normalizer();
    writeln!(w, "norm {} / {}", bits(&norm.mean), bits(&norm.std))?;
    let mut params = Vec::new();
    c.get_params(&mut params);
    writeln!(w, "params {}", bits(&params))?;
    Ok(())
}

pub fn read_model(r: impl BufRead) -> Result<AnyModel> {
    let mut lines = r.lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| CadError::invalid("truncated model file"))
    };
    if next()?.trim() != MAGIC {
        return Err(CadError::invalid("not a retcad model file"));
    }
    let kind_line = next()?;
    let kind_parts: Vec<&str> = kind_line.split_whitespace().collect();
    let dims_line = next()?;
    let dims: Vec<usize> = dims_line
        .strip_prefix("dims")
        .ok_or_else(|| CadError::invalid("missing dims line"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| CadError::invalid("bad dims")))
        .collect::<Result<_>>()?;
    if dims.len() != 2 {
        return Err(CadError::invalid("dims line needs input and hidden sizes"));
    }
    let norm_line = next()?;
    let norm_body =
        norm_line.strip_prefix("norm ").ok_or_else(|| CadError::invalid("missing norm line"))?;
    let (mean_s, std_s) =
        norm_body.split_once(" / ").ok_or_else(|| CadError::invalid("malformed norm line"))?;
    let norm = Normalizer { mean: parse_bits(mean_s)?, std: parse_bits(std_s)? };
    let params_line = next()?;
    let params = parse_bits(
        params_line
            .strip_prefix("params ")
            .ok_or_else(|| CadError::invalid("missing params line"))?,
    )?;

    let mut model = match kind_parts.as_slice() {
        ["kind", "wnn", name] => {
            let kind = WaveletKind::parse(name)
                .ok_or_else(|| CadError::invalid(format!("unknown wavelet '{name}'")))?;
            AnyModel::Wnn(WnnModel::new(kind, dims[0], dims[1], 0)?)
        }
        ["kind", "mlp"] => AnyModel::Mlp(MlpModel::new(dims[0], dims[1], 0)?),
        _ => return Err(CadError::invalid("unknown model kind")),
    };
    {
        let c = model.as_classifier_mut();
        if params.len() != c.param_len() {
            return Err(CadError::invalid("parameter count mismatch"));
        }
        if norm.mean.len() != dims[0] || norm.std.len() != dims[0] {
            return Err(CadError::invalid("normalizer dimension mismatch"));
        }
        c.set_normalizer(norm);
        c.set_params(&params);
    }
    Ok(model)
}
