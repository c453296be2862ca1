//! Regenerates the shipped surrogate walker library and stride kinematics.
//!
//! cargo run -p safeswitch-core --example design_walker -- crates/core/data

use std::path::PathBuf;

use safeswitch_core::schema::LibraryDocument;
use safeswitch_core::surrogate::{surrogate_walker, DesignOptions};
use safeswitch_core::walker::StrideSetDocument;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&out)?;
    let (lib, strides) = surrogate_walker(&DesignOptions::default())?;
    for p in lib.primitives() {
        println!(
            "G{}: basin {} rate {:.6}",
            p.id, p.basin_level, p.contraction
        );
    }
    let doc = LibraryDocument::from_library("surrogate-walker", &lib);
    std::fs::write(out.join("walker_library.json"), doc.to_json_pretty() + "\n")?;
    let strides = serde_json::to_string_pretty(&StrideSetDocument::from_strides(&strides))?;
    std::fs::write(out.join("walker_strides.json"), strides + "\n")?;
    Ok(())
}
