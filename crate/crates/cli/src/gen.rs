use dlo_eval::bundle::write_bundle;
use dlo_eval::{generate_scene, tier_params};

use crate::args::GenArgs;
use crate::diag;
use crate::error::{CliError, Result, Status};
use crate::run::worse;

pub fn gen(a: GenArgs) -> Result<Status> {
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let mut status = Status::Ok;
    for i in 0..a.count as usize {
        let dir = a.out.join(format!("scene_{i:04}"));
        let outcome = generate_scene(&tier_params(usize::from(a.tier), a.seed, i))
            .and_then(|scene| write_bundle(&dir, &scene))
            .map_err(CliError::from);
        match outcome {
            Ok(()) => println!("{}", dir.display()),
            Err(e) => {
                diag::item_error(&dir, &e);
                status = worse(status, e.status());
            }
        }
    }
    Ok(status)
}
