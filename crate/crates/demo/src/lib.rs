//! Browser front end. Each export takes the same JSON config the CLI reads
//! and returns plain text for the page to show.

use kite_core::cli::{self, Format, Instance, Suite};
use kite_core::structure;
use kite_core::RdpClass;
use wasm_bindgen::prelude::*;

fn instance(config: &str) -> Result<Instance, String> {
    let cfg = cli::parse_config(config).map_err(|e| e.to_string())?;
    Instance::build(&cfg).map_err(|e| e.to_string())
}

/// What the kite does with `x` and `y`, and where `x` lands in the interval.
pub fn kite_arithmetic(config: &str, x: &str, y: &str) -> Result<String, String> {
    let inst = instance(config)?;
    let (k, _) = inst.kite.as_ref().ok_or("this needs lambda and rho in the config")?;
    let x = k.parse_element(x).map_err(|e| e.to_string())?;
    let y = k.parse_element(y).map_err(|e| e.to_string())?;
    let show = |s: Option<kite_core::KiteElement>| s.map_or("undefined".to_string(), |e| e.to_string());
    let (minus, tilde) = k.negations(&x);
    let mut out = format!("{}\n", k.describe());
    out.push_str(&format!("x + y = {}\n", show(k.add(&x, &y))));
    out.push_str(&format!("y + x = {}\n", show(k.add(&y, &x))));
    out.push_str(&format!("x⁻ = {minus}\nx∼ = {tilde}\n"));
    out.push_str(&format!("x <= y: {}\n", k.leq(&x, &y)));
    out.push_str(&format!("Phi(x) = {} with phi = {}\n", structure::iso_phi(k, &x), inst.shape.phi));
    Ok(out)
}

/// One refinement table for `a1 + a2 = b1 + b2`.
pub fn refinement(config: &str, elems: [&str; 4], class: &str) -> Result<String, String> {
    let inst = instance(config)?;
    let class: RdpClass = class.parse().map_err(|e: kite_core::Error| e.to_string())?;
    cli::refine_text(&inst, elems, class).map(|(text, _)| text).map_err(|e| e.to_string())
}

/// Irreducibility verdict and orbit decomposition.
pub fn classification(config: &str) -> Result<String, String> {
    let inst = instance(config)?;
    let reports = cli::run_with(&inst, &[Suite::Irreducibility, Suite::Decompose], false);
    let text = cli::emit_report("", &reports, Format::Text);
    let body = text.strip_prefix("config \n").unwrap_or(&text);
    Ok(format!("{}{body}", cli::classify_text(&inst)))
}

#[wasm_bindgen]
pub fn kite_sum(config: &str, x: &str, y: &str) -> Result<String, JsError> {
    kite_arithmetic(config, x, y).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn refine(config: &str, a1: &str, a2: &str, b1: &str, b2: &str, class: &str) -> Result<String, JsError> {
    refinement(config, [a1, a2, b1, b2], class).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn classify(config: &str) -> Result<String, JsError> {
    classification(config).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const KITE: &str = r#"{"group":{"kind":"integers"},"index_size":2,"lambda":[0,1],"rho":[1,0],"bound":1}"#;

    #[test]
    fn arithmetic_shows_noncommuting_sums() {
        let out = kite_arithmetic(KITE, "L[0,1]", "U[-1,0]").unwrap();
        assert!(out.contains("x + y = "), "{out}");
        assert!(out.contains("Phi(x) = (0)"), "{out}");
        assert!(kite_arithmetic(KITE, "L[0]", "U[0,0]").is_err());
    }

    #[test]
    fn refinement_table() {
        let out = refinement(KITE, ["(1)[0,1]", "(0)[2,0]", "(0)[0,1]", "(1)[0,2]"], "RDP1").unwrap();
        assert!(out.contains("RDP1: valid"), "{out}");
    }

    #[test]
    fn classification_of_a_split_orbit() {
        let cfg = r#"{"group":{"kind":"integers"},"index_size":4,"phi":[1,0,3,2],"bound":1}"#;
        let out = classification(cfg).unwrap();
        assert!(out.contains("2 factor(s)"), "{out}");
        assert!(!out.starts_with("config"), "{out}");
    }
}
