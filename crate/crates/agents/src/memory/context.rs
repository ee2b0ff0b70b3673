use std::collections::{BTreeSet, VecDeque};

use crate::gateway::{AgentMessage, Role};

/// Short-term conversation memory for one agent session.
///
/// System messages are pinned and never evicted: the agent prompt first,
/// then any retrieved memory notes. `capacity` bounds the remaining
/// messages. Eviction removes the oldest message, and an assistant
/// message that carried tool calls leaves together with its results, so
/// the window never holds an orphaned tool result.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextBuffer {
    system: AgentMessage,
    pinned: Vec<AgentMessage>,
    messages: VecDeque<AgentMessage>,
    capacity: usize,
}

impl ContextBuffer {
    pub fn new(system: AgentMessage, capacity: usize) -> Self {
        debug_assert_eq!(system.role, Role::System);
        ContextBuffer {
            system,
            pinned: Vec::new(),
            messages: VecDeque::new(),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Non-system messages currently held.
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Pin an extra system message right after the prompt.
    pub fn pin(&mut self, message: AgentMessage) {
        self.pinned.push(message);
    }

    /// Append a message, evicting as needed. System messages are pinned;
    /// a tool result whose call is no longer in the window is dropped.
    pub fn append(&mut self, message: AgentMessage) {
        match message.role {
            Role::System => return self.pin(message),
            Role::ToolResult => {
                let id = message.tool_call_id.as_deref().unwrap_or_default();
                if !self.live_call_ids().contains(id) {
                    return;
                }
            }
            _ => {}
        }
        self.messages.push_back(message);
        while self.messages.len() > self.capacity {
            self.evict_oldest();
        }
    }

    fn live_call_ids(&self) -> BTreeSet<&str> {
        self.messages
            .iter()
            .flat_map(|m| m.tool_calls.iter().map(|c| c.id.as_str()))
            .collect()
    }

    fn evict_oldest(&mut self) {
        let Some(first) = self.messages.pop_front() else {
            return;
        };
        if first.tool_calls.is_empty() {
            return;
        }
        let ids: BTreeSet<&str> = first.tool_calls.iter().map(|c| c.id.as_str()).collect();
        self.messages.retain(|m| {
            m.role != Role::ToolResult
                || !m.tool_call_id.as_deref().is_some_and(|id| ids.contains(id))
        });
    }

    /// Current contents in order: prompt, pinned notes, then the rest.
    pub fn window(&self) -> Vec<AgentMessage> {
        let mut out = Vec::with_capacity(1 + self.pinned.len() + self.messages.len());
        out.push(self.system.clone());
        out.extend(self.pinned.iter().cloned());
        out.extend(self.messages.iter().cloned());
        out
    }

    /// Forget everything except the agent prompt.
    pub fn clear(&mut self) {
        self.pinned.clear();
        self.messages.clear();
    }
}
