//! Browser bindings. Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page has one code path.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use somos::kernel::{parse_rational, Rational};
use somos::sequences::{gale_robinson_extend_partial, GaleRobinsonParams};
use somos::volterra::{triangles, y_closed, RiccatiSolution, TermCache};
use somos::LinearParams;

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).map_err(|e| format!("`{s}`: {e}"))
}

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Terms `t_lo..t_hi` of `t_n t_{n+N} = α t_{n+p} t_{n+N−p} + β t_{n+q} t_{n+N−q}`.
#[wasm_bindgen]
pub fn orbit(order: u32, p: u32, q: u32, alpha: &str, beta: &str, init: &str, lo: i32, hi: i32) -> String {
    respond((|| {
        if lo > hi || hi - lo > 400 {
            return Err(format!("range {lo}..{hi} must be nonempty and at most 400 long"));
        }
        let seeds = init.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
        let params = GaleRobinsonParams::new(order as usize, p as usize, q as usize, rational(alpha)?, rational(beta)?, seeds)
            .map_err(|e| e.to_string())?;
        let (w, err) = gale_robinson_extend_partial(&params, lo.into(), hi.into()).map_err(|e| e.to_string())?;
        let terms: Vec<Value> = w
            .iter()
            .filter(|(n, _)| (i64::from(lo)..=i64::from(hi)).contains(n))
            .map(|(n, t)| json!({ "n": n, "t": t.to_string() }))
            .collect();
        Ok(json!({ "terms": terms, "error": err.map(|e| e.to_string()) }))
    })())
}

/// Closed-form `Y_n(x)` for `n` in `lo..=hi`, with `B(x)` and the poles of `B`.
#[wasm_bindgen]
pub fn volterra_profile(p: &str, q: &str, t0: &str, t1: &str, x: f64, lo: i32, hi: i32) -> String {
    respond((|| {
        if lo > hi || hi - lo > 200 {
            return Err(format!("sites {lo}..{hi} must be nonempty and at most 200 wide"));
        }
        let params = LinearParams::new(rational(p)?, rational(q)?, rational(t0)?, rational(t1)?);
        let sol = RiccatiSolution::new(&params.p, &params.q).map_err(|e| e.to_string())?;
        let (back, fwd) = sol.poles();
        let b = sol.eval(x).map_err(|e| e.to_string())?;
        let cache = TermCache::new(&params, i64::from(lo) - 1, i64::from(hi) + 3).map_err(|e| e.to_string())?;
        let ys: Vec<Value> = (i64::from(lo)..=i64::from(hi))
            .map(|n| match y_closed(n, x, &cache, &sol) {
                Ok(y) => json!({ "n": n, "y": y }),
                Err(e) => json!({ "n": n, "error": e.to_string() }),
            })
            .collect();
        Ok(json!({ "x": x, "B": b, "kind": format!("{:?}", sol.kind), "poles": [back, fwd], "Y": ys }))
    })())
}

/// Rows of the `e`-triangle and the Eulerian triangle with their checks.
#[wasm_bindgen]
pub fn triangle_rows(n: u32) -> String {
    respond(triangles(n as usize).map(|(_, _, rep)| serde_json::to_value(rep).expect("serializes")).map_err(|e| e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn somos4_orbit() {
        let v = parse(orbit(4, 1, 2, "1", "1", "1,1,1,1", 0, 9));
        let terms: Vec<&str> = v["terms"].as_array().unwrap().iter().map(|t| t["t"].as_str().unwrap()).collect();
        assert_eq!(terms, ["1", "1", "1", "1", "2", "3", "7", "23", "59", "314"]);
        assert!(v["error"].is_null());
    }

    #[test]
    fn orbit_errors() {
        assert!(parse(orbit(4, 1, 2, "1", "1", "1,1,1", 0, 9))["error"].is_string());
        assert!(parse(orbit(4, 1, 2, "x", "1", "1,1,1,1", 0, 9))["error"].is_string());
        assert!(parse(orbit(4, 1, 2, "1", "1", "1,1,1,1", 5, 2))["error"].is_string());
        let partial = parse(orbit(4, 1, 2, "1", "-1", "1,1,1,1", 0, 12));
        assert!(partial["error"].as_str().unwrap().contains("vanishing"));
        assert!(!partial["terms"].as_array().unwrap().is_empty());
    }

    #[test]
    fn profile_at_zero() {
        let v = parse(volterra_profile("1", "-1", "0", "1", 0.0, 1, 3));
        assert_eq!(v["B"], 0.0);
        let y1 = v["Y"][0]["y"].as_f64().unwrap();
        assert!((y1 - 1.5).abs() < 1e-12, "{v}");
        assert!(parse(volterra_profile("1", "0", "0", "1", 0.0, 1, 3))["error"].is_string());
    }

    #[test]
    fn triangles_json() {
        let v = parse(triangle_rows(5));
        assert_eq!(v["e_rows"][4], json!(["1", "22", "16"]));
        assert_eq!(v["all_ok"], true);
        assert!(parse(triangle_rows(99))["error"].is_string());
    }
}
