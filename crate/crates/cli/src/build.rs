use clap::ValueEnum;
use serde_json::{json, Value};
use symdet::circuit::Circuit;
use symdet::formula::{build_sym_graph, build_valiant_digraph, close_sym_graph, sym_matrix, valiant_matrix, SizeMode};
use symdet::graph::SymbolicMatrix;
use symdet::minimize::minimize;
use symdet::ws::{build_ws_abp, build_ws_graph, close_ws_graph, ws_nonsym_matrix, ws_sym_matrix, WsMode};

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Valiant,
    Sym,
    WsSym,
    WsNonsym,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Size {
    Skinny,
    Green,
    Fat,
}

/// A matrix with the dimension bound that applies to it.
pub struct Built {
    pub matrix: SymbolicMatrix,
    pub dot: String,
    pub bound_name: String,
    pub bound: usize,
    pub note: Option<String>,
}

impl Built {
    pub fn holds(&self) -> bool {
        self.matrix.dim() <= self.bound
    }

    pub fn summary(&self) -> String {
        let verdict = if self.holds() { "ok" } else { "VIOLATED" };
        format!("dim {} <= {} = {}: {verdict}", self.matrix.dim(), self.bound_name, self.bound)
    }

    pub fn report(&self) -> Value {
        json!({ "dim": self.matrix.dim(), "bound": { "name": self.bound_name, "value": self.bound, "holds": self.holds() } })
    }

    /// A bound violation is a hard error.
    pub fn enforce(&self) -> CliResult<()> {
        if self.holds() {
            Ok(())
        } else {
            Err(symdet::Error::BoundViolation { dim: self.matrix.dim(), bound: self.bound }.into())
        }
    }
}

fn green_size(c: &Circuit) -> CliResult<usize> {
    Ok(minimize(c)?.skinny_size())
}

fn bad_size(method: Method, size: Size) -> CliError {
    CliError::Usage(format!("size {size:?} does not apply to method {method:?}").to_lowercase())
}

/// Runs one construction; the size defaults to green.
pub fn build(c: &Circuit, method: Method, size: Option<Size>) -> CliResult<Built> {
    let size = size.unwrap_or(Size::Green);
    match method {
        Method::Valiant => {
            if size != Size::Green {
                return Err(bad_size(method, size));
            }
            let cert = build_valiant_digraph(c)?;
            let e = green_size(c)?;
            // without an addition the diagonal may need one extra entry for the constant
            let (bound_name, bound) = if cert.sum_sinks.is_empty() { ("e+2", e + 2) } else { ("e+1", e + 1) };
            Ok(Built {
                matrix: valiant_matrix(c)?,
                dot: cert.digraph.export_dot(),
                bound_name: bound_name.into(),
                bound,
                note: None,
            })
        }
        Method::Sym => {
            let (mode, e) = match size {
                Size::Skinny => (SizeMode::Skinny, c.skinny_size()),
                Size::Green => (SizeMode::Green, green_size(c)?),
                Size::Fat => return Err(bad_size(method, size)),
            };
            let cert = build_sym_graph(c, mode)?;
            let has_addition = c.gates().iter().any(|g| g.kind == symdet::circuit::GateKind::Add);
            Ok(Built {
                matrix: sym_matrix(c, mode)?,
                dot: close_sym_graph(&cert)?.export_dot(),
                bound_name: "2e+3".into(),
                bound: 2 * e + 3,
                note: cert.sharpening_note(has_addition),
            })
        }
        Method::WsSym | Method::WsNonsym => {
            let (mode, m, bound_name) = match size {
                Size::Fat => (WsMode::Fat, c.fat_size(), "m"),
                Size::Green => {
                    let g = minimize(c)?;
                    (WsMode::Green, g.skinny_size() + g.var_inputs(), "(e+i)")
                }
                Size::Skinny => return Err(bad_size(method, size)),
            };
            if method == Method::WsSym {
                Ok(Built {
                    matrix: ws_sym_matrix(c, mode)?,
                    dot: close_ws_graph(&build_ws_graph(c, mode)?)?.export_dot(),
                    bound_name: format!("2{bound_name}+1"),
                    bound: 2 * m + 1,
                    note: None,
                })
            } else {
                let (abp, _, _) = build_ws_abp(c, mode)?;
                Ok(Built {
                    matrix: ws_nonsym_matrix(c, mode)?,
                    dot: abp.export_dot(),
                    bound_name: format!("{bound_name}+1"),
                    bound: m + 1,
                    note: None,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use symdet::circuit::{examples, parse_expression};

    #[test]
    fn every_method_respects_its_bound() {
        let f = examples::formula();
        for (method, size) in [(Method::Valiant, Size::Green), (Method::Sym, Size::Skinny), (Method::Sym, Size::Green)] {
            assert!(build(&f, method, Some(size)).unwrap().holds());
        }
        let ws = examples::weakly_skew();
        for method in [Method::WsSym, Method::WsNonsym] {
            for size in [Size::Fat, Size::Green] {
                assert!(build(&ws, method, Some(size)).unwrap().holds());
            }
        }
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let f = parse_expression("x + y").unwrap();
        assert!(matches!(build(&f, Method::Valiant, Some(Size::Fat)), Err(CliError::Usage(_))));
        assert!(matches!(build(&f, Method::WsSym, Some(Size::Skinny)), Err(CliError::Usage(_))));
    }

    #[test]
    fn pure_products_use_the_diagonal_bound() {
        let built = build(&parse_expression("2*x*y").unwrap(), Method::Valiant, None).unwrap();
        assert_eq!((built.matrix.dim(), built.bound), (3, 3));
    }
}
