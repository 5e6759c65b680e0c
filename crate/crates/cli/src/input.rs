use std::fs;

use serde::de::DeserializeOwned;

use ncjulia::domain::DeltaMatrix;
use ncjulia::fixtures::{fixture, ClosedForm, Fixture};
use ncjulia::realization::{random_realization, NcFunctionHandle, Realization};

use crate::commands::CliError;
use crate::Source;

/// Reads `arg` as inline JSON when it starts with `{` or `[`, else as a path.
pub fn load_json<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T, CliError> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        (arg.to_string(), "inline".to_string())
    } else {
        let text = fs::read_to_string(arg)
            .map_err(|e| CliError::Input(format!("cannot read {what} `{arg}`: {e}")))?;
        (text, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{what} ({origin}): {e}")))
}

pub struct Resolved {
    pub fixture: Option<Fixture>,
    pub delta: DeltaMatrix,
    pub realization: Option<Realization>,
}

impl Resolved {
    pub fn handle(&self) -> Result<NcFunctionHandle, CliError> {
        let r = self.realization.clone().ok_or_else(|| {
            CliError::Precondition(
                "no realization: pass --realization or a fixture that has one".into(),
            )
        })?;
        Ok(NcFunctionHandle::new(r, self.delta.clone())?)
    }

    pub fn closed_form(&self, form: ClosedForm) -> Option<ClosedForm> {
        self.fixture
            .as_ref()?
            .closed_forms
            .iter()
            .copied()
            .find(|&f| f == form)
    }
}

fn parse_random_spec(spec: &str, j: usize) -> Result<Option<Realization>, CliError> {
    let Some(rest) = spec.strip_prefix("random:") else {
        return Ok(None);
    };
    let bad = || {
        CliError::Parse(format!(
            "realization spec `{spec}` must look like random:<dim_E>:<seed>"
        ))
    };
    let (m, seed) = rest.split_once(':').ok_or_else(bad)?;
    let m: usize = m.parse().map_err(|_| bad())?;
    let seed: u64 = seed.parse().map_err(|_| bad())?;
    Ok(Some(random_realization(m, j, seed)?))
}

pub fn resolve(source: &Source) -> Result<Resolved, CliError> {
    let fixture = source.fixture.as_deref().map(fixture).transpose()?;
    let delta = match (&source.delta, &fixture) {
        (Some(arg), _) => load_json::<DeltaMatrix>(arg, "delta")?,
        (None, Some(f)) => f.delta.clone(),
        (None, None) => return Err(CliError::Precondition("pass --fixture or --delta".into())),
    };
    let realization = match &source.realization {
        Some(arg) => match parse_random_spec(arg, delta.j())? {
            Some(r) => Some(r),
            None => Some(load_json::<Realization>(arg, "realization")?),
        },
        None => fixture.as_ref().and_then(|f| f.realization.clone()),
    };
    Ok(Resolved {
        fixture,
        delta,
        realization,
    })
}
