//! Gateway, user channel and transcript handling for one command.

use std::path::{Path, PathBuf};

use adaplan_agents::gateway::{
    Gateway, LiveBackend, LiveConfig, ReplayBackend, Script, ScriptedBackend, Transcript,
};
use adaplan_agents::generators::{ReplayUser, ScriptedUser, TerminalUser, UserChannel};

use crate::config::Mode;
use crate::rundir::RunDir;

pub const RUN_TRANSCRIPT: &str = "transcript.json";

/// Where replies and answers come from for one command.
#[derive(Debug, Clone, Default)]
pub struct Source {
    pub mode: Option<Mode>,
    pub fixture: Option<PathBuf>,
    pub script: Option<PathBuf>,
    /// Scripted answers to user questions; the terminal is asked otherwise.
    pub answers: Option<Vec<String>>,
}

pub struct Session {
    pub gateway: Gateway,
    pub user: Box<dyn UserChannel>,
    mode: Mode,
    fixture: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Answers file: one answer per line.
pub fn read_answers(path: &Path) -> Result<Vec<String>, String> {
    Ok(read(path)?.lines().map(str::to_string).collect())
}

impl Session {
    pub fn open(source: &Source, live: &LiveConfig, ceiling: usize) -> Result<Session, String> {
        let mode = source.mode.unwrap_or(Mode::Live);
        let scripted_user = || -> Box<dyn UserChannel> {
            match &source.answers {
                Some(a) => Box::new(ScriptedUser::new(a.clone())),
                None => Box::new(TerminalUser),
            }
        };
        let live_backend = || LiveBackend::new(live.clone()).map_err(|e| e.to_string());
        let (gateway, user): (Gateway, Box<dyn UserChannel>) = match mode {
            Mode::Live => (Gateway::new(live_backend()?), scripted_user()),
            Mode::Record => {
                if source.fixture.is_none() {
                    return Err(
                        "record mode needs --fixture to write the transcript to".to_string()
                    );
                }
                let gateway = match &source.script {
                    Some(path) => {
                        let script = Script::from_json(&read(path)?).map_err(|e| {
                            format!("{} is not a reply script: {e}", path.display())
                        })?;
                        Gateway::new(ScriptedBackend::new(script))
                    }
                    None => Gateway::new(live_backend()?),
                };
                (gateway, scripted_user())
            }
            Mode::Replay => {
                let Some(path) = &source.fixture else {
                    return Err("replay mode needs --fixture".to_string());
                };
                let transcript = Transcript::from_json(&read(path)?)
                    .map_err(|e| format!("{} is not a transcript: {e}", path.display()))?;
                let user = Box::new(ReplayUser::new(&transcript.answers));
                (
                    Gateway::new(ReplayBackend::new(transcript)),
                    user as Box<dyn UserChannel>,
                )
            }
        };
        Ok(Session {
            gateway: gateway.recording().with_ceiling(ceiling),
            user,
            mode,
            fixture: source.fixture.clone(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Save the transcript into the run directory and, when recording, to
    /// the fixture path.
    pub fn close(&self, run: &mut RunDir) -> Result<(), String> {
        let transcript = self.gateway.transcript().unwrap_or_default();
        let text = transcript.to_json();
        run.write(RUN_TRANSCRIPT, &text)?;
        if self.mode == Mode::Record {
            if let Some(path) = &self.fixture {
                std::fs::write(path, &text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
        }
        Ok(())
    }
}
