use std::sync::Mutex;

use super::message::AgentMessage;
use super::transcript::{fingerprint, Transcript};
use super::{ChatBackend, ChatRequest, GatewayError};

/// Serves recorded responses in order. A request whose fingerprint differs
/// from the recorded one means the code under test diverged from the
/// fixture.
pub struct ReplayBackend {
    transcript: Transcript,
    position: Mutex<usize>,
}

impl ReplayBackend {
    pub fn new(transcript: Transcript) -> Self {
        ReplayBackend {
            transcript,
            position: Mutex::new(0),
        }
    }

    /// Responses consumed so far.
    pub fn position(&self) -> usize {
        *self.position.lock().expect("replay lock")
    }

    pub fn remaining(&self) -> usize {
        self.transcript.entries.len() - self.position()
    }
}

impl ChatBackend for ReplayBackend {
    fn chat(&self, request: &ChatRequest) -> Result<AgentMessage, GatewayError> {
        let mut pos = self.position.lock().expect("replay lock");
        let Some(entry) = self.transcript.entries.get(*pos) else {
            return Err(GatewayError::TranscriptExhausted(*pos));
        };
        let actual = fingerprint(request);
        if actual != entry.fingerprint {
            return Err(GatewayError::FingerprintMismatch {
                position: *pos,
                expected: entry.fingerprint.clone(),
                actual,
                agent: request.agent.clone(),
            });
        }
        *pos += 1;
        Ok(entry.response.clone())
    }
}
