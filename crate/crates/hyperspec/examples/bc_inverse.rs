//! Full boundary-control reconstruction of a slow lens from boundary spectral data.
//! Writes CSV tables and a manifest to `bc-out/`. Takes about a minute.
use hyperspec::bc::pipeline::{run_bc, BcConfig};
use hyperspec::bc::MetricSpec;
use hyperspec::io::Manifest;

fn main() -> hyperspec::Result<()> {
    let cfg = BcConfig::standard(MetricSpec::lens());
    let rep = run_bc(&cfg, "")?;
    for c in &rep.checks {
        println!("{}", c.line());
    }
    let out = std::path::Path::new("bc-out");
    let mut manifest = Manifest::new("bc_inverse example", 0, false, serde_json::to_value(&cfg).expect("serialisable"));
    rep.write_into(out, &mut manifest)?;
    manifest.passed = rep.passed();
    manifest.write(&out.join("manifest.json"))
}
