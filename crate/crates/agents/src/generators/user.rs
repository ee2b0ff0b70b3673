//! The channel through which agents ask the user questions.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use crate::gateway::AnswerRecord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UserError {
    #[error("no answer available for question {0:?}")]
    Exhausted(String),
    #[error("recorded question {expected:?} does not match {asked:?}")]
    Mismatch { expected: String, asked: String },
    #[error("terminal input failed: {0}")]
    Io(String),
}

pub trait UserChannel {
    /// Block until the user answers.
    fn ask(&mut self, question: &str) -> Result<String, UserError>;
}

/// Prompts on stderr and reads one line from stdin.
pub struct TerminalUser;

impl UserChannel for TerminalUser {
    fn ask(&mut self, question: &str) -> Result<String, UserError> {
        let mut err = std::io::stderr();
        write!(err, "{question}\n> ")
            .and_then(|_| err.flush())
            .map_err(|e| UserError::Io(e.to_string()))?;
        let mut line = String::new();
        let n = std::io::stdin()
            .lock()
            .read_line(&mut line)
            .map_err(|e| UserError::Io(e.to_string()))?;
        if n == 0 {
            return Err(UserError::Exhausted(question.to_string()));
        }
        Ok(line.trim().to_string())
    }
}

/// Answers given in advance, consumed in order regardless of the question.
#[derive(Debug, Clone, Default)]
pub struct ScriptedUser {
    answers: VecDeque<String>,
}

impl ScriptedUser {
    pub fn new(answers: impl IntoIterator<Item = String>) -> Self {
        ScriptedUser {
            answers: answers.into_iter().collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.answers.len()
    }
}

impl UserChannel for ScriptedUser {
    fn ask(&mut self, question: &str) -> Result<String, UserError> {
        self.answers
            .pop_front()
            .ok_or_else(|| UserError::Exhausted(question.to_string()))
    }
}

/// Answers recorded in a transcript. Each question must match the
/// recorded one.
#[derive(Debug, Clone, Default)]
pub struct ReplayUser {
    records: VecDeque<AnswerRecord>,
}

impl ReplayUser {
    pub fn new(records: &[AnswerRecord]) -> Self {
        ReplayUser {
            records: records.iter().cloned().collect(),
        }
    }
}

impl UserChannel for ReplayUser {
    fn ask(&mut self, question: &str) -> Result<String, UserError> {
        let r = self
            .records
            .pop_front()
            .ok_or_else(|| UserError::Exhausted(question.to_string()))?;
        if r.question != question {
            return Err(UserError::Mismatch {
                expected: r.question,
                asked: question.to_string(),
            });
        }
        Ok(r.answer)
    }
}

/// A channel that has no user behind it.
pub struct NoUser;

impl UserChannel for NoUser {
    fn ask(&mut self, question: &str) -> Result<String, UserError> {
        Err(UserError::Exhausted(question.to_string()))
    }
}
