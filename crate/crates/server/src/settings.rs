//! Runtime configuration shared by the CLI and the HTTP service.

use std::path::PathBuf;
use std::sync::Arc;

use podgen::providers::http::HttpProvider;
use podgen::providers::mock::MockSpeechSynthesizer;
use podgen::providers::{DEFAULT_PARALLELISM, DEFAULT_WORDS_PER_SECOND};
use podgen::liveqa::DEFAULT_TAU;
use podgen::{Engine, EngineConfig, Providers};

use crate::store::DataDir;

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub data_dir: PathBuf,
    /// Base URL of an HTTP provider; mocks are used when unset.
    pub provider_url: Option<String>,
    pub tau: f64,
    pub words_per_second: f64,
    pub parallelism: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            data_dir: PathBuf::from("data"),
            provider_url: None,
            tau: DEFAULT_TAU,
            words_per_second: DEFAULT_WORDS_PER_SECOND,
            parallelism: DEFAULT_PARALLELISM,
        }
    }
}

impl Settings {
    pub fn data(&self) -> DataDir {
        DataDir::new(&self.data_dir)
    }

    pub fn providers(&self) -> anyhow::Result<Providers> {
        Ok(match &self.provider_url {
            Some(url) => Providers::http(HttpProvider::new(url.clone())?),
            None => {
                let mut p = Providers::mock();
                p.speech = Arc::new(MockSpeechSynthesizer { words_per_second: self.words_per_second, ..Default::default() });
                p
            }
        })
    }

    pub fn engine(&self) -> anyhow::Result<Engine> {
        anyhow::ensure!(self.words_per_second > 0.0, "words per second must be positive");
        anyhow::ensure!(self.tau.is_finite(), "tau must be finite");
        let reference = self.data().reference_dir();
        let config = EngineConfig {
            words_per_second: self.words_per_second,
            parallelism: self.parallelism.max(1),
            tau: self.tau,
            reference_dir: reference.is_dir().then_some(reference),
            ..EngineConfig::default()
        };
        Ok(Engine::new(self.providers()?, config))
    }
}
