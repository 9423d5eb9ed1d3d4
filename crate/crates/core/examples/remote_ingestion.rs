//! Fetch a newform from the modular-forms database and cache the responses.
//!
//!     cargo run --example remote_ingestion -- 7.3.b.a [cache-dir]
//!
//! The base URL comes from SATO_TATE_BASE_URL. A second run with the same
//! cache directory works offline.

use sato_tate::forms::remote::RemoteClient;
use sato_tate::satake::{classes_from_records, DEFAULT_TOL};

fn main() {
    let mut args = std::env::args().skip(1);
    let label = args.next().unwrap_or_else(|| "7.3.b.a".into());
    let cache = args.next().unwrap_or_else(|| "sato-tate-cache".into());
    let client = RemoteClient::from_env(&cache);
    match client.newform(&label) {
        Ok((desc, records)) => {
            println!(
                "{}: level {}, weight {}, character order {}, CM {:?}",
                desc.label, desc.level, desc.weight, desc.nebentypus.order, desc.is_cm
            );
            println!("{} eigenvalues, cached under {cache}/remote", records.len());
            match classes_from_records(&desc, &records, DEFAULT_TOL) {
                Ok(classes) => {
                    for c in classes.iter().take(8) {
                        println!(
                            "  p = {:>3}: theta = {:.6}, det = z^{}",
                            c.p,
                            c.theta,
                            c.det.exponent()
                        );
                    }
                }
                Err(e) => eprintln!("could not form Satake classes: {e}"),
            }
        }
        Err(e) => {
            eprintln!("{label}: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
