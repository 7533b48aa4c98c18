#![no_main]

use derksen::expr::{eval, parse_expr, ExprAst};
use libfuzzer_sys::fuzz_target;

fn node_count(ast: &ExprAst) -> usize {
    match ast {
        ExprAst::Number(_) | ExprAst::Variable(_) => 1,
        ExprAst::Neg(inner) | ExprAst::Pow(inner, _) => node_count(inner) + 1,
        ExprAst::Add(a, b) | ExprAst::Mul(a, b) => node_count(a) + node_count(b) + 1,
    }
}

// Anything the grammar accepts must evaluate, print in canonical form, and
// parse back to the same ring element. Degree and size caps keep single
// executions fast; otherwise legal inputs like nested powers would be
// misreported as hangs.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if text.len() > 128 {
        return;
    }
    let Ok(ast) = parse_expr(text) else {
        return;
    };
    if ast.degree_bound() > 64 || node_count(&ast) > 48 {
        return;
    }
    let spec = derksen::cusp::standard_ring();
    let value = eval(&ast, &spec);
    let printed = value.to_string();
    let reparsed =
        derksen::expr::parse_and_eval(&printed, &spec).expect("canonical output must parse");
    assert_eq!(reparsed, value, "roundtrip changed the element: {printed}");
});
