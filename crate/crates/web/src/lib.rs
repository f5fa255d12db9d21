//! wasm-bindgen entry points for the static page in `www/`.

use defectcert::artin::{ladder_limit, AsEngine, EmbeddingConfig};
use defectcert::engine::{expand as expand_poly, value_rat};
use defectcert::keyseq::GenSeq;
use defectcert::parse::{parse_expr, parse_poly};
use defectcert::poly::{Ring, RingTag};
use defectcert::ratfunc::RatFunc;
use defectcert::tower::{build_tower, DEFAULT_BUDGET};
use wasm_bindgen::prelude::*;

/// Deepest ladder the page may ask for. At `p = 7, k = 2` the tower no
/// longer fits in a 32-bit address space.
pub fn max_ladder_k(p: u32) -> usize {
    if p >= 7 {
        1
    } else {
        2
    }
}

fn ring(p: u32, tag: &str) -> Result<Ring, String> {
    let t = RingTag::parse(tag).ok_or_else(|| format!("unknown ring `{tag}`"))?;
    Ring::new(t, p).map_err(|e| e.to_string())
}

pub fn value_text(p: u32, tag: &str, expr: &str) -> Result<String, String> {
    let r = ring(p, tag)?;
    let f = parse_expr(expr, r).map_err(|e| e.to_string())?;
    let v = match r.tag {
        RingTag::UV => GenSeq::p_sequence(p).and_then(|s| value_rat(&f, &s)),
        RingTag::XY => GenSeq::q_sequence(p).and_then(|s| value_rat(&f, &s)),
        RingTag::XV => EmbeddingConfig::default_for(p)
            .and_then(AsEngine::new)
            .and_then(|e| e.nu1(&f)),
    };
    v.map(|v| v.to_string()).map_err(|e| e.to_string())
}

pub fn expand_text(p: u32, tag: &str, expr: &str) -> Result<String, String> {
    let r = ring(p, tag)?;
    let seq = match r.tag {
        RingTag::UV => GenSeq::p_sequence(p),
        RingTag::XY => GenSeq::q_sequence(p),
        RingTag::XV => return Err("expansion needs ring uv or xy".into()),
    }
    .map_err(|e| e.to_string())?;
    let f = parse_poly(expr, r).map_err(|e| e.to_string())?;
    let e = expand_poly(&f, &seq).map_err(|e| e.to_string())?;
    let v = value_rat(&RatFunc::from_poly(f), &seq).map_err(|e| e.to_string())?;
    Ok(format!("{}\nvalue {v}", e.render(&seq)))
}

/// Tab-separated rows `label  value`: the ladder `f = 0, 1/h_0, …, 1/h_k`
/// followed by `limit` and `floor` lines.
pub fn ladder_text(p: u32, k_max: usize) -> Result<String, String> {
    if k_max > max_ladder_k(p) {
        return Err(format!("k is capped at {} for p = {p}", max_ladder_k(p)));
    }
    let run = || -> defectcert::Result<String> {
        let e = AsEngine::new(EmbeddingConfig::default_for(p)?)?;
        let t = build_tower(p, k_max, k_max + 3, DEFAULT_BUDGET)?;
        let mut rows = vec![format!("0\t{}", e.approximation_value(&RatFunc::zero(e.cfg.base_ring()))?)];
        for a in e.approximants(&t, k_max)? {
            rows.push(format!("1/h_{}\t{}", a.k, e.approximation_value(&a.h.inv()?)?));
        }
        let (limit, floor) = ladder_limit(p);
        rows.push(format!("limit\t{limit}"));
        rows.push(format!("floor\t{floor}"));
        Ok(rows.join("\n"))
    };
    run().map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn value(p: u32, ring: &str, expr: &str) -> Result<String, JsError> {
    value_text(p, ring, expr).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn expand(p: u32, ring: &str, expr: &str) -> Result<String, JsError> {
    expand_text(p, ring, expr).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = maxLadderK)]
pub fn max_ladder_k_js(p: u32) -> usize {
    max_ladder_k(p)
}

#[wasm_bindgen]
pub fn ladder(p: u32, k_max: usize) -> Result<String, JsError> {
    ladder_text(p, k_max).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(value_text(2, "uv", "v^4 + u").unwrap(), "17/16");
        assert_eq!(value_text(2, "xv", "1/x").unwrap(), "-1/2");
        assert!(value_text(2, "uv", "u + )").unwrap_err().contains("offset 4"));
        assert!(value_text(4, "uv", "u").is_err());
    }

    #[test]
    fn expansion() {
        let text = expand_text(2, "uv", "v^5").unwrap();
        assert!(text.ends_with("value 5/4"), "{text}");
        assert!(expand_text(2, "xv", "x").is_err());
    }

    #[test]
    fn ladder_rows() {
        let text = ladder_text(2, 1).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows, ["0\t-1/2", "1/h_0\t-15/32", "1/h_1\t-239/512", "limit\t-7/15", "floor\t-1/4"]);
        assert!(ladder_text(3, 2).is_ok());
        assert!(ladder_text(2, 3).is_err());
        assert!(ladder_text(7, 2).is_err());
    }
}
