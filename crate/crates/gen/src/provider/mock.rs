use super::{Provider, ProviderMeta, ProviderOutput};
use crate::error::GenerateError;
use crate::prompts::PromptPayload;
use crate::rewrite::mock_rewrite;

/// Offline provider that steers the document toward the requested level
/// with [`mock_rewrite`]. Pure and deterministic; never touches the network.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockProvider {
    seed: u64,
}

impl MockProvider {
    pub const MODEL: &'static str = "mock-rewriter";

    pub fn new(seed: u64) -> Self {
        MockProvider { seed }
    }
}

impl Provider for MockProvider {
    fn model(&self) -> &str {
        Self::MODEL
    }

    fn generate(&self, payload: &PromptPayload) -> Result<ProviderOutput, GenerateError> {
        Ok(ProviderOutput {
            text: mock_rewrite(&payload.document, payload.level, self.seed),
            meta: ProviderMeta {
                model: Self::MODEL.into(),
                ..ProviderMeta::default()
            },
        })
    }
}
