use std::fmt::Write;

use symdet::circuit::{examples, parse_expression, Circuit};
use symdet::detsym::{det_sym_matrix, leibniz_det};
use symdet::graph::SymbolicMatrix;
use symdet::poly::{symbolic_det, DensePolynomial, DET_LIMIT};
use symdet::verify::{identity_test, Status};
use symdet::FieldSpec;

use crate::build::{build, Method, Size};
use crate::CliResult;

const DEMO_SEED: u64 = 0;

/// Exact comparison when the matrix is small enough, seeded random points otherwise.
fn check(c: &Circuit, m: &SymbolicMatrix) -> CliResult<(bool, String)> {
    let q = FieldSpec::Rational;
    if m.dim() <= DET_LIMIT {
        let ok = symbolic_det(m, &q)? == c.expand_single(&q)?;
        return Ok((ok, "exact".into()));
    }
    let verdict = identity_test(c, m, 20, &FieldSpec::default_prime(), DEMO_SEED)?;
    let how = match verdict.status {
        Status::VerifiedRandom { trials, .. } => format!("{trials} random points"),
        Status::VerifiedExact => "exact".into(),
        Status::Failed(_) => "random points".into(),
    };
    Ok((verdict.verified(), how))
}

fn matrix(text: &str) -> CliResult<SymbolicMatrix> {
    Ok(SymbolicMatrix::parse(text, &FieldSpec::Rational)?)
}

/// The report text and whether every reproduced value matched.
pub fn run() -> CliResult<(String, bool)> {
    let q = FieldSpec::Rational;
    let mut out = String::new();
    let mut all_ok = true;

    let f = examples::formula();
    let ws = examples::weakly_skew();
    let target = f.expand_single(&q)?;
    writeln!(out, "# worked example: {target}").unwrap();
    for (name, c) in [("formula", &f), ("weakly-skew circuit", &ws)] {
        let s = c.measure();
        writeln!(out, "{name}: skinny {} fat {} inputs {} green {:?}", s.skinny, s.fat, s.var_inputs, s.green).unwrap();
    }
    let runs = [
        (&f, Method::Valiant, Size::Green, "valiant"),
        (&f, Method::Sym, Size::Skinny, "sym/skinny"),
        (&f, Method::Sym, Size::Green, "sym/green"),
        (&ws, Method::WsSym, Size::Fat, "ws-sym/fat"),
        (&ws, Method::WsSym, Size::Green, "ws-sym/green"),
        (&ws, Method::WsNonsym, Size::Fat, "ws-nonsym/fat"),
        (&ws, Method::WsNonsym, Size::Green, "ws-nonsym/green"),
    ];
    for (c, method, size, label) in runs {
        let built = build(c, method, Some(size))?;
        let (ok, how) = check(c, &built.matrix)?;
        all_ok &= ok && built.holds();
        writeln!(out, "{label:<16} {} ; det {} ({how})", built.summary(), if ok { "matches" } else { "DIFFERS" }).unwrap();
    }

    writeln!(out, "\n# small matrices").unwrap();
    let five = matrix("5\n0 x 0 y -1\nx 0 1 0 0\n0 1 0 -1 0\ny 0 -1 0 1/2\n-1 0 0 1/2 0")?;
    let four = matrix("4\nx 0 0 1\n0 y 0 1\n0 0 1 0\n1 1 0 0")?;
    let triangle = matrix("3\n0 x y\nx 0 z\ny z 0")?;
    let sum = DensePolynomial::parse("x + y", &q)?;
    let det5 = symbolic_det(&five, &q)?;
    all_ok &= det5 == sum;
    writeln!(out, "symmetric 5x5 for x+y: det = {det5}").unwrap();
    writeln!(out, "4x4 for x+y: det = {}", symbolic_det(&four, &q)?).unwrap();
    let det3 = symbolic_det(&triangle, &q)?;
    all_ok &= det3 == DensePolynomial::parse("2 x y z", &q)?;
    writeln!(out, "[[0,x,y],[x,0,z],[y,z,0]]: det = {det3}").unwrap();
    let product = build(&parse_expression("2*x*y")?, Method::Valiant, None)?;
    all_ok &= product.matrix.dim() > 2;
    writeln!(out, "2xy via valiant: dim {} (no 2x2 representation exists)", product.matrix.dim()).unwrap();

    writeln!(out, "\n# symmetric determinant").unwrap();
    for n in 1..=2 {
        let m = det_sym_matrix(n);
        let ok = symbolic_det(&m, &q).ok().map(|d| d == leibniz_det(n, &q).unwrap());
        let verdict = match ok {
            Some(true) => "det matches (exact)".to_string(),
            Some(false) => {
                all_ok = false;
                "det DIFFERS".to_string()
            }
            None => "symbolic check skipped".to_string(),
        };
        writeln!(out, "n = {n}: dim {} <= {} ; {verdict}", m.dim(), 4 * n * n * n + 7).unwrap();
    }
    Ok((out, all_ok))
}
