use rug::Rational;
use smtrace::congruences::*;
use smtrace::genus::GenusCharSpec;
use smtrace::modfn::ModFuncExpr;
use smtrace::traces::{generating_series, TraceConfig, TraceContext, TraceTable};

fn j_ctx() -> TraceContext {
    let f = ModFuncExpr::builtin("builtin:J", None).unwrap();
    TraceContext::new(f, GenusCharSpec::trivial(1), TraceConfig::default()).unwrap()
}

#[test]
fn ur_sieve_level_one() {
    let ctx = j_ctx();
    let mut table = TraceTable::empty(&ctx);
    table.fill(&ctx, &ur_indices(3, 7, 12)).unwrap();
    let s = apply_ur_sieve(&table, 3, 7, 12).unwrap();
    assert_eq!(s.coeff(2), 0);
    assert_eq!(&s.coeff(5), table.get(35).unwrap());
    assert_ne!(s.coeff(5), 0);
    for (m, _) in s.terms() {
        assert_eq!(smtrace::arith::kronecker(7 * m, 3), -1);
    }
    assert!(apply_ur_sieve(&table, 1, 7, 12).unwrap().is_zero());
    assert!(matches!(apply_ur_sieve(&table, 3, 11, 12), Err(smtrace::Error::MissingIndex(_))));
}

#[test]
fn ur_sieve_is_sieve_then_u() {
    let ctx = j_ctx();
    let g = generating_series(&ctx, 60).unwrap().series;
    let mut table = TraceTable::empty(&ctx);
    for r in [5u64, 7] {
        table.fill(&ctx, &ur_indices(3, r, 60 / r as i64)).unwrap();
        let direct = apply_ur_sieve(&table, 3, r, 60 / r as i64 - 1).unwrap();
        let composed = g.sieve_minus(3).unwrap().u_op(r);
        let positive = smtrace::qseries::QSeries::from_terms(
            direct.prec(),
            composed.terms().filter(|(n, _)| *n >= 1).map(|(n, c)| (n, c.clone())),
        );
        assert_eq!(direct, positive, "r={r}");
    }
}

#[test]
fn generating_series_clears_to_itself() {
    let g = generating_series(&j_ctx(), 100).unwrap().series;
    let (m, s) = clear_denominators(&g, 100);
    assert_eq!(m, 1);
    assert_eq!(s, g);
    assert!(s.is_integral());
    let c = cuspify(&g, required_delta_power(&g), 50).unwrap();
    assert_eq!(c.valuation(), Some(1));
    assert!(c.is_integral());
}

#[test]
fn small_scan_reproduces() {
    let ctx = j_ctx();
    let params = ScanParams { p: 3, nu: 1, t: 1, m_exp: 0, n_max: 20 };
    assert!(scan_congruence(&ctx, &mut TraceTable::empty(&ctx), &params, &[]).unwrap().is_empty());
    // t = 1: no n is admissible, every verdict vacuous
    let rep = scan_congruence(&ctx, &mut TraceTable::empty(&ctx), &params, &[11]).unwrap();
    assert!(rep[0].checked.is_empty() && rep[0].verdict);
    assert!(scan_congruence(&ctx, &mut TraceTable::empty(&ctx), &params, &[13]).is_err());

    let params = ScanParams { p: 3, nu: 1, t: 3, m_exp: 0, n_max: 3 };
    let mut table = TraceTable::empty(&ctx);
    let rep = scan_congruence(&ctx, &mut table, &params, &[107]).unwrap();
    assert_eq!(rep[0].checked.len(), 1);
    let fresh = TraceContext { cfg: TraceConfig::new(256, 8192).unwrap(), ..ctx.clone() };
    for c in &rep[0].checked {
        assert_eq!(c.n % 3, 1);
        let v = fresh.trace(c.index).unwrap().value.coefficient(1).unwrap();
        assert_eq!(v, c.value);
        let res = Rational::from(&v * &rug::Integer::from_str_radix(&rep[0].omega, 10).unwrap());
        assert_eq!(res.numer().clone().modulo(&3.into()).to_string(), c.residue);
    }
    let json = serde_json::to_string(&rep).unwrap();
    let back: Vec<CongruenceReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rep);
}
