//! Per-level paraphrase instructions and the chat payload built from them.

use serde::{Deserialize, Serialize};

use readctl_core::Level;

use crate::error::PromptError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub target_level: Level,
    pub instruction: String,
}

const INSTRUCTIONS: [&str; 8] = [
    "Paraphrase this document for a professional. It should be extremely difficult to read and best understood by university graduates.",
    "Paraphrase this document for college graduate level (US). It should be very difficult to read and best understood by university graduates.",
    "Paraphrase this document for college level (US). It should be difficult to read.",
    "Paraphrase this document for 10th-12th grade school level (US). It should be fairly difficult to read.",
    "Paraphrase this document for 8th/9th grade school level (US). It should be plain English and easily understood by 13- to 15-year-old students.",
    "Paraphrase this document for 7th grade school level (US). It should be fairly easy to read.",
    "Paraphrase this document for 6th grade school level (US). It should be easy to read and conversational English for consumers.",
    "Paraphrase this document for 5th grade school level (US). It should be very easy to read and easily understood by an average 11-year old student.",
];

/// One instruction per level, in level order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptCatalog {
    specs: Vec<PromptSpec>,
}

impl Default for PromptCatalog {
    fn default() -> Self {
        PromptCatalog {
            specs: Level::ALL
                .iter()
                .zip(INSTRUCTIONS)
                .map(|(&target_level, instruction)| PromptSpec {
                    target_level,
                    instruction: instruction.to_string(),
                })
                .collect(),
        }
    }
}

impl PromptCatalog {
    /// The default catalog with the given instructions replaced.
    pub fn with_overrides<'a>(overrides: impl IntoIterator<Item = (Level, &'a str)>) -> Self {
        let mut catalog = Self::default();
        for (level, text) in overrides {
            catalog.specs[level.index()].instruction = text.to_string();
        }
        catalog
    }

    pub fn specs(&self) -> &[PromptSpec] {
        &self.specs
    }

    pub fn instruction(&self, level: Level) -> &str {
        &self.specs[level.index()].instruction
    }

    /// Payload for a level given by its numeric label.
    pub fn build(&self, label: u32, document: &str) -> Result<PromptPayload, PromptError> {
        let level = Level::from_label(label).ok_or(PromptError::UnknownLevel(label))?;
        Ok(self.payload(level, document))
    }

    pub fn payload(&self, level: Level, document: &str) -> PromptPayload {
        PromptPayload {
            level,
            instruction: self.instruction(level).to_string(),
            document: document.to_string(),
        }
    }
}

/// Builds the default-catalog payload for a numeric level label.
pub fn build_prompt(label: u32, document: &str) -> Result<PromptPayload, PromptError> {
    PromptCatalog::default().build(label, document)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPayload {
    pub level: Level,
    pub instruction: String,
    pub document: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl PromptPayload {
    /// The user turn: instruction, blank line, document.
    pub fn user_content(&self) -> String {
        format!("{}\n\n{}", self.instruction, self.document)
    }

    pub fn messages(&self, system_prompt: Option<&str>) -> Vec<ChatMessage> {
        let mut out = Vec::with_capacity(2);
        if let Some(system) = system_prompt {
            out.push(ChatMessage {
                role: "system".into(),
                content: system.into(),
            });
        }
        out.push(ChatMessage {
            role: "user".into(),
            content: self.user_content(),
        });
        out
    }
}
