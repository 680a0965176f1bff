//! Checkpoints: a `mhdcrit-field-v1` snapshot of the state plus a JSON
//! sidecar with the time, step counter, parameters and ledger accumulator.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::LedgerAccumulator;
use crate::field::snapshot::{read_snapshot, write_snapshot};
use crate::field::{ScalarField, VectorField};
use crate::solver::{PhysicalParams, State, SCHEME_VERSION};

use super::CliError;

pub const SIDECAR_FORMAT: &str = "mhdcrit-checkpoint-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub format: String,
    pub t: f64,
    pub step: usize,
    pub params: PhysicalParams,
    pub scheme_version: String,
    pub accumulator: LedgerAccumulator,
}

/// `<dir>/ckpt_<step>.snap`; the sidecar shares the stem with `.json`.
pub fn checkpoint_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("ckpt_{step:08}.snap"))
}

pub fn sidecar_path(snapshot: &Path) -> PathBuf {
    snapshot.with_extension("json")
}

pub fn write_checkpoint(
    dir: &Path,
    step: usize,
    state: &State,
    params: &PhysicalParams,
    acc: &LedgerAccumulator,
) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = checkpoint_path(dir, step);
    let fields = state.named_fields();
    let names: Vec<&str> = fields.iter().map(|(n, _)| n.as_str()).collect();
    let refs: Vec<&ScalarField> = fields.iter().map(|(_, f)| *f).collect();
    let mut w = BufWriter::new(File::create(&path)?);
    write_snapshot(&mut w, &names, &refs).map_err(|e| CliError::Io(e.to_string()))?;
    w.flush()?;
    let sidecar = Sidecar {
        format: SIDECAR_FORMAT.into(),
        t: state.t,
        step,
        params: *params,
        scheme_version: SCHEME_VERSION.into(),
        accumulator: acc.clone(),
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(sidecar_path(&path), json + "\n")?;
    Ok(path)
}

/// Load a checkpoint given either its snapshot or sidecar path.
pub fn read_checkpoint(path: &Path) -> Result<(State, Sidecar), CliError> {
    let snap = path.with_extension("snap");
    let side = sidecar_path(&snap);
    let text = std::fs::read_to_string(&side).map_err(|e| CliError::Config(format!("{}: {e}", side.display())))?;
    let sidecar: Sidecar =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", side.display())))?;
    if sidecar.format != SIDECAR_FORMAT {
        return Err(CliError::Config(format!("unsupported checkpoint format {:?}", sidecar.format)));
    }
    if sidecar.scheme_version != SCHEME_VERSION {
        return Err(CliError::Config(format!(
            "checkpoint written by scheme {:?}, this build runs {SCHEME_VERSION:?}",
            sidecar.scheme_version
        )));
    }
    let file = File::open(&snap).map_err(|e| CliError::Config(format!("{}: {e}", snap.display())))?;
    let (grid, header, fields) =
        read_snapshot(BufReader::new(file)).map_err(|e| CliError::Config(format!("{}: {e}", snap.display())))?;
    let dim = grid.dim();
    let axes = ["x", "y", "z"];
    let mut expected = vec!["rho".to_string()];
    expected.extend((0..dim).map(|a| format!("u_{}", axes[a])));
    expected.extend((0..dim).map(|a| format!("h_{}", axes[a])));
    expected.push("p".into());
    if header.fields != expected {
        return Err(CliError::Config(format!("unexpected checkpoint fields {:?}", header.fields)));
    }
    let mut it = fields.into_iter();
    let rho = it.next().expect("rho");
    let u: Vec<ScalarField> = it.by_ref().take(dim).collect();
    let h: Vec<ScalarField> = it.by_ref().take(dim).collect();
    let p = it.next().expect("p");
    let mk = |c| VectorField::new(c).map_err(|e| CliError::Config(e.to_string()));
    let state = State { t: sidecar.t, rho, u: mk(u)?, h: mk(h)?, p };
    Ok((state, sidecar))
}

/// Checkpoint snapshots in `dir`, sorted by step.
pub fn list_checkpoints(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "snap")
                && p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("ckpt_"))
        })
        .collect();
    out.sort();
    Ok(out)
}
