use std::fs;
use std::path::Path;

use symdet::circuit::{parse_expression, Circuit};
use symdet::graph::SymbolicMatrix;
use symdet::FieldSpec;

use crate::{CircuitInput, CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Gate-list text starts with a `vars` line; anything else is one expression.
pub fn circuit_from_text(text: &str) -> CliResult<Circuit> {
    let first = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty());
    let c = match first {
        Some(line) if line == "vars" || line.starts_with("vars ") => Circuit::parse(text)?,
        _ => parse_expression(text.trim())?,
    };
    Ok(c)
}

pub fn load_circuit_path(path: &Path) -> CliResult<Circuit> {
    circuit_from_text(&read(path)?)
}

pub fn load_circuit(input: &CircuitInput) -> CliResult<Circuit> {
    match (&input.path, &input.expr) {
        (Some(path), None) => load_circuit_path(path),
        (None, Some(expr)) => Ok(parse_expression(expr)?),
        _ => Err(CliError::Usage("give a circuit file or --expr".into())),
    }
}

pub fn load_matrix(path: &Path, spec: &FieldSpec) -> CliResult<SymbolicMatrix> {
    Ok(SymbolicMatrix::parse(&read(path)?, spec)?)
}

/// `q`, `p61`, a decimal prime, `gf2^16`, or `gf2`.
pub fn parse_field(text: &str) -> CliResult<FieldSpec> {
    let spec = match text.to_ascii_lowercase().as_str() {
        "q" | "rational" => FieldSpec::Rational,
        "p61" | "mersenne" => FieldSpec::default_prime(),
        "gf2^16" | "gf65536" => FieldSpec::gf2_16(),
        "gf2" | "gf2^1" => FieldSpec::gf2(),
        other => {
            let p: u64 = other.parse().map_err(|_| CliError::Usage(format!("unknown field `{text}`")))?;
            FieldSpec::prime(p).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_both_circuit_formats() {
        let gates = circuit_from_text("# comment\nvars x y\ng0 = input x\ng1 = input y\ng2 = add g0 g1\noutput g2\n").unwrap();
        let expr = circuit_from_text("x + y\n").unwrap();
        assert_eq!(gates.skinny_size(), expr.skinny_size());
        assert!(circuit_from_text("x + ").is_err());
    }

    #[test]
    fn field_names() {
        assert_eq!(parse_field("p61").unwrap(), FieldSpec::default_prime());
        assert_eq!(parse_field("GF2^16").unwrap(), FieldSpec::gf2_16());
        assert_eq!(parse_field("101").unwrap(), FieldSpec::prime(101).unwrap());
        assert!(matches!(parse_field("100"), Err(CliError::Usage(_))));
        assert!(matches!(parse_field("reals"), Err(CliError::Usage(_))));
    }
}
