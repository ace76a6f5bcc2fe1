//! Canonical JSON encodings of scalars, forms, chains, plots and unitary maps.
//!
//! Object keys are sorted and every number is an exact integer, so equal
//! values serialize to identical bytes. The grammar is in `docs/FORMAT.md`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use serde_json::{json, Map, Number, Value};

use crate::chen::Plot;
use crate::chern::{Generator, UnitaryMap};
use crate::cyclic::Chain;
use crate::error::{Error, Result};
use crate::form::{Form, TTForm};
use crate::scalar::Scalar;
use crate::trig::{Mono, TrigPoly, VarKind, VarSpace};

pub const CHAIN_TAG: &str = "cyclic-chern/chain";
pub const FORM_TAG: &str = "cyclic-chern/form";
pub const PLOT_TAG: &str = "cyclic-chern/plot";
pub const MAP_TAG: &str = "cyclic-chern/unitary";

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn big(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integers are valid JSON numbers"))
}

fn parse_big(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string()).or_else(|_| err(format!("{n} is not an integer"))),
        _ => err(format!("expected an integer, found {v}")),
    }
}

fn parse_i64(v: &Value) -> Result<i64> {
    v.as_i64().map_or_else(|| err(format!("expected a small integer, found {v}")), Ok)
}

fn parse_usize(v: &Value) -> Result<usize> {
    v.as_u64().map_or_else(|| err(format!("expected a count, found {v}")), |n| Ok(n as usize))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).map_or_else(|| err(format!("missing field `{key}`")), Ok)
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().map_or_else(|| err(format!("{what} must be an array")), Ok)
}

fn check_tag(v: &Value, tag: &str) -> Result<()> {
    match v.get("format").and_then(Value::as_str) {
        Some(t) if t == tag => Ok(()),
        Some(t) => err(format!("expected format `{tag}`, found `{t}`")),
        None => err(format!("missing `format` tag (expected `{tag}`)")),
    }
}

/// `{ "<τ-power>": [num_re, den_re, num_im, den_im], … }`.
pub fn scalar_to_json(s: &Scalar) -> Value {
    let mut m = Map::new();
    for (k, c) in s.terms() {
        m.insert(
            k.to_string(),
            json!([big(c.re.numer()), big(c.re.denom()), big(c.im.numer()), big(c.im.denom())]),
        );
    }
    Value::Object(m)
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    let obj = v.as_object().map_or_else(|| err("a scalar must be an object"), Ok)?;
    let mut terms = Vec::with_capacity(obj.len());
    for (k, c) in obj {
        let power: i32 = k.parse().or_else(|_| err(format!("bad τ-power `{k}`")))?;
        let parts = array(c, "a scalar coefficient")?;
        if parts.len() != 4 {
            return err("a scalar coefficient has four integers");
        }
        let p: Vec<BigInt> = parts.iter().map(parse_big).collect::<Result<_>>()?;
        if p[1] == BigInt::from(0) || p[3] == BigInt::from(0) {
            return err("zero denominator");
        }
        let re = BigRational::new(p[0].clone(), p[1].clone());
        let im = BigRational::new(p[2].clone(), p[3].clone());
        terms.push((power, Complex::new(re, im)));
    }
    Ok(Scalar::from_terms(terms))
}

fn layout_to_json(space: &VarSpace, coords: usize) -> Value {
    let vars: Vec<&str> = space
        .kinds()
        .iter()
        .map(|k| match k {
            VarKind::Periodic => "periodic",
            VarKind::Interval => "interval",
        })
        .collect();
    json!({ "coords": coords, "vars": vars })
}

fn layout_from_json(v: &Value) -> Result<(VarSpace, usize)> {
    let kinds = array(field(v, "vars")?, "`vars`")?
        .iter()
        .map(|k| match k.as_str() {
            Some("periodic") => Ok(VarKind::Periodic),
            Some("interval") => Ok(VarKind::Interval),
            _ => err(format!("unknown variable kind {k}")),
        })
        .collect::<Result<Vec<_>>>()?;
    let coords = parse_usize(field(v, "coords")?)?;
    if coords > kinds.len() || coords > 31 {
        return err(format!("{coords} coordinates over {} variables", kinds.len()));
    }
    Ok((VarSpace::new(kinds), coords))
}

fn poly_to_json(p: &TrigPoly) -> Value {
    Value::Array(
        p.terms()
            .map(|(key, c)| {
                let key: Vec<Value> = key.iter().map(|m| json!([m.freq, m.pow])).collect();
                json!({ "coef": scalar_to_json(c), "key": key })
            })
            .collect(),
    )
}

fn poly_from_json(v: &Value, space: &VarSpace) -> Result<TrigPoly> {
    let mut p = TrigPoly::zero(space);
    for t in array(v, "a polynomial")? {
        let key = array(field(t, "key")?, "`key`")?
            .iter()
            .map(|m| {
                let pair = array(m, "a monomial")?;
                if pair.len() != 2 {
                    return err("a monomial is [freq, pow]");
                }
                let freq = i32::try_from(parse_i64(&pair[0])?).or_else(|_| err("frequency out of range"))?;
                let pow = u32::try_from(parse_i64(&pair[1])?).or_else(|_| err("power must be non-negative"))?;
                Ok(Mono { freq, pow })
            })
            .collect::<Result<Vec<_>>>()?;
        if key.len() != space.len() {
            return err(format!("monomial over {} variables in a layout of {}", key.len(), space.len()));
        }
        if key.iter().zip(space.kinds()).any(|(m, k)| *k == VarKind::Periodic && m.pow != 0) {
            return err("periodic variables carry no powers");
        }
        p.add_term(key, scalar_from_json(field(t, "coef")?)?);
    }
    Ok(p)
}

fn components_to_json(f: &Form) -> Value {
    Value::Array(
        f.components()
            .map(|(mask, p)| {
                let dz: Vec<u32> = (0..32).filter(|i| mask & (1 << i) != 0).collect();
                json!({ "dz": dz, "poly": poly_to_json(p) })
            })
            .collect(),
    )
}

fn components_from_json(v: &Value, space: &VarSpace, coords: usize) -> Result<Form> {
    let mut f = Form::zero(space, coords);
    for c in array(v, "form components")? {
        let mut mask = 0u32;
        for i in array(field(c, "dz")?, "`dz`")? {
            let i = parse_usize(i)?;
            if i >= coords {
                return err(format!("differential dz{i} beyond {coords} coordinates"));
            }
            if mask & (1 << i) != 0 {
                return err(format!("repeated differential dz{i}"));
            }
            mask |= 1 << i;
        }
        f.add_component(mask, poly_from_json(field(c, "poly")?, space)?);
    }
    Ok(f)
}

fn ttform_to_json(w: &TTForm) -> Value {
    json!({ "alpha": components_to_json(&w.alpha), "beta": components_to_json(&w.beta) })
}

fn ttform_from_json(v: &Value, space: &VarSpace, coords: usize) -> Result<TTForm> {
    Ok(TTForm::new(
        components_from_json(field(v, "alpha")?, space, coords)?,
        components_from_json(field(v, "beta")?, space, coords)?,
    ))
}

pub fn form_to_json(w: &TTForm) -> Value {
    json!({
        "format": FORM_TAG,
        "layout": layout_to_json(w.space(), w.coords()),
        "alpha": components_to_json(&w.alpha),
        "beta": components_to_json(&w.beta),
    })
}

pub fn form_from_json(v: &Value) -> Result<TTForm> {
    check_tag(v, FORM_TAG)?;
    let (space, coords) = layout_from_json(field(v, "layout")?)?;
    ttform_from_json(v, &space, coords)
}

/// The stored presentation, term by term.
pub fn chain_to_json(w: &Chain) -> Value {
    let terms: Vec<Value> = w
        .terms()
        .iter()
        .map(|t| {
            let factors: Vec<Value> = t.factors.iter().map(ttform_to_json).collect();
            json!({ "coef": scalar_to_json(&t.coef), "factors": factors })
        })
        .collect();
    json!({
        "format": CHAIN_TAG,
        "layout": layout_to_json(w.space(), w.coords()),
        "terms": terms,
    })
}

pub fn chain_from_json(v: &Value) -> Result<Chain> {
    check_tag(v, CHAIN_TAG)?;
    let (space, coords) = layout_from_json(field(v, "layout")?)?;
    let mut out = Chain::zero(&space, coords);
    for (i, t) in array(field(v, "terms")?, "`terms`")?.iter().enumerate() {
        let factors = array(field(t, "factors")?, "`factors`")?
            .iter()
            .enumerate()
            .map(|(k, f)| {
                ttform_from_json(f, &space, coords).map_err(|e| Error::Parse(format!("term {i}, slot {k}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return err(format!("term {i} has no slots"));
        }
        out.push(scalar_from_json(field(t, "coef")?)?, factors);
    }
    Ok(out)
}

pub fn plot_to_json(p: &Plot) -> Value {
    let c: Vec<String> = p.c().iter().map(|x| x.to_string()).collect();
    json!({ "format": PLOT_TAG, "m": p.m(), "d": p.d(), "a": p.a(), "v": p.v(), "c": c })
}

pub fn plot_from_json(v: &Value) -> Result<Plot> {
    check_tag(v, PLOT_TAG)?;
    let m = parse_usize(field(v, "m")?)?;
    let d = parse_usize(field(v, "d")?)?;
    let a = array(field(v, "a")?, "`a`")?
        .iter()
        .map(|r| array(r, "a row of `a`")?.iter().map(parse_i64).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let vel = array(field(v, "v")?, "`v`")?.iter().map(parse_i64).collect::<Result<Vec<_>>>()?;
    let c = array(field(v, "c")?, "`c`")?
        .iter()
        .map(|x| match x {
            Value::String(s) => BigRational::from_str(s).or_else(|_| err(format!("bad rational `{s}`"))),
            Value::Number(_) => Ok(BigRational::from_integer(parse_big(x)?)),
            _ => err("offsets are rationals written as strings"),
        })
        .collect::<Result<Vec<_>>>()?;
    Plot::new(m, d, a, vel, c)
}

fn generator_to_json(g: &Generator) -> Value {
    match g {
        Generator::DiagExp { freqs, rates } => {
            if rates.iter().all(|r| *r == 0) {
                json!({ "diag": freqs })
            } else {
                json!({ "diag": freqs, "rates": rates })
            }
        }
        Generator::Const(m) => {
            let rows: Vec<Vec<Value>> = m.iter().map(|r| r.iter().map(scalar_to_json).collect()).collect();
            json!({ "const": rows })
        }
        Generator::Sum(a, b) => json!({ "sum": [map_body(a), map_body(b)] }),
    }
}

fn map_body(g: &UnitaryMap) -> Value {
    let word: Vec<Value> = g.word().iter().map(generator_to_json).collect();
    json!({ "l": g.l(), "d": g.d(), "word": word })
}

pub fn map_to_json(g: &UnitaryMap) -> Value {
    let mut v = map_body(g);
    v["format"] = json!(MAP_TAG);
    v
}

fn generator_from_json(v: &Value) -> Result<Generator> {
    if let Some(freqs) = v.get("diag") {
        let freqs = array(freqs, "`diag`")?
            .iter()
            .map(|k| {
                array(k, "a frequency vector")?
                    .iter()
                    .map(|x| i32::try_from(parse_i64(x)?).or_else(|_| err("frequency out of range")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if v.get("rates").is_some() {
            return err("time rates belong to homotopies, not maps");
        }
        return Ok(Generator::diag_exp(freqs));
    }
    if let Some(rows) = v.get("const") {
        let m = array(rows, "`const`")?
            .iter()
            .map(|r| array(r, "a matrix row")?.iter().map(scalar_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        return Ok(Generator::Const(m));
    }
    if let Some(parts) = v.get("sum") {
        let parts = array(parts, "`sum`")?;
        if parts.len() != 2 {
            return err("`sum` takes two maps");
        }
        return Ok(Generator::Sum(Box::new(map_body_from_json(&parts[0])?), Box::new(map_body_from_json(&parts[1])?)));
    }
    err(format!("unknown generator {v}"))
}

fn map_body_from_json(v: &Value) -> Result<UnitaryMap> {
    let l = parse_usize(field(v, "l")?)?;
    let d = parse_usize(field(v, "d")?)?;
    let word = array(field(v, "word")?, "`word`")?
        .iter()
        .map(generator_from_json)
        .collect::<Result<Vec<_>>>()?;
    UnitaryMap::new(l, d, word)
}

pub fn map_from_json(v: &Value) -> Result<UnitaryMap> {
    check_tag(v, MAP_TAG)?;
    map_body_from_json(v)
}

/// Pretty-printed canonical text with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn parse_text(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn scalar_encoding() {
        let s = &(&Scalar::frac(-3, 4) * &Scalar::tau_pow(2)) + &Scalar::i();
        let v = scalar_to_json(&s);
        assert_eq!(v.to_string(), r#"{"0":[0,1,1,1],"2":[-3,4,0,1]}"#);
        assert_eq!(scalar_from_json(&v).unwrap(), s);
        assert_eq!(scalar_to_json(&Scalar::zero()).to_string(), "{}");
    }

    #[test]
    fn huge_integers_survive() {
        let n: BigInt = "123456789012345678901234567890".parse().unwrap();
        let s = Scalar::from_rational(BigRational::from_integer(n));
        assert_eq!(scalar_from_json(&parse_text(&to_text(&scalar_to_json(&s))).unwrap()).unwrap(), s);
    }

    #[test]
    fn plot_round_trip() {
        let p = Plot::new(1, 2, vec![vec![1], vec![-2]], vec![0, 1], vec![rat(1, 4), rat(-3, 2)]).unwrap();
        assert_eq!(plot_from_json(&plot_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn rejects_wrong_tag() {
        let v = json!({ "format": PLOT_TAG });
        assert!(matches!(chain_from_json(&v), Err(Error::Parse(_))));
    }
}
