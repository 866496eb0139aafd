//! TOML file formats for models, estimated priors and codebooks.
//!
//! A model file holds the alphabet sizes, state sizes, initial states and the
//! three kernel tables as flat arrays, conditioning indices varying slowest:
//!
//! * `source`: `G(x, omega | omega')` as `[omega'][x][omega]`;
//! * `secondary`: `V(y, theta | x, theta')` as `[x][theta'][y][theta]`;
//! * `primary`: `W(z, sigma | x, sigma')` as `[x][sigma'][z][sigma]`.
//!
//! ```toml
//! [alphabet]
//! x = 2
//! y = 2
//! z = 2
//!
//! [states]
//! omega = 1
//! sigma = 1
//! theta = 1
//!
//! [kernels]
//! source = [0.5, 0.5]
//! secondary = [1.0, 0.0, 0.0, 1.0]
//! primary = [0.9, 0.1, 0.1, 0.9]
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use udec_core::decoding::Codebook;
use udec_core::model::{AlphabetSpec, ChannelKernel, HmmKernel, SourceKernel, StateSpec, SystemModel};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet: AlphabetSection,
    pub states: StatesSection,
    pub kernels: KernelSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSection {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesSection {
    pub omega: usize,
    pub sigma: usize,
    pub theta: usize,
    #[serde(default)]
    pub omega0: usize,
    #[serde(default)]
    pub sigma0: usize,
    #[serde(default)]
    pub theta0: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub source: Vec<f64>,
    pub secondary: Vec<f64>,
    pub primary: Vec<f64>,
}

impl ModelFile {
    pub fn from_model(model: &SystemModel) -> Self {
        let a = model.alphabet();
        let s = model.states();
        Self {
            alphabet: AlphabetSection {
                x: a.x_size,
                y: a.y_size,
                z: a.z_size,
            },
            states: StatesSection {
                omega: s.omega_size,
                sigma: s.sigma_size,
                theta: s.theta_size,
                omega0: s.omega0,
                sigma0: s.sigma0,
                theta0: s.theta0,
            },
            kernels: KernelSection {
                source: model.source().table().to_vec(),
                secondary: model.secondary().table().to_vec(),
                primary: model.primary().table().to_vec(),
            },
        }
    }

    pub fn build(&self) -> Result<SystemModel> {
        let a = self.alphabet;
        let s = self.states;
        let alphabet = AlphabetSpec::new(a.x, a.y, a.z);
        let states = StateSpec {
            omega_size: s.omega,
            sigma_size: s.sigma,
            theta_size: s.theta,
            omega0: s.omega0,
            sigma0: s.sigma0,
            theta0: s.theta0,
        };
        let k = &self.kernels;
        let source = SourceKernel::new(a.x, s.omega, k.source.clone())?;
        let secondary = ChannelKernel::secondary(a.x, a.y, s.theta, k.secondary.clone())?;
        let primary = ChannelKernel::primary(a.x, a.z, s.sigma, k.primary.clone())?;
        Ok(SystemModel::new(alphabet, states, source, secondary, primary)?)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(path.display().to_string(), e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(path.display().to_string(), e))
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse(origin.to_string(), e.to_string()))
}

fn render<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Parse("output".into(), e.to_string()))
}

pub fn parse_model(text: &str) -> Result<SystemModel> {
    parse::<ModelFile>(text, "model")?.build()
}

/// Loads and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<SystemModel> {
    let path = path.as_ref();
    parse::<ModelFile>(&read(path)?, &path.display().to_string())?.build()
}

pub fn model_to_string(model: &SystemModel) -> Result<String> {
    render(&ModelFile::from_model(model))
}

pub fn save_model(model: &SystemModel, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &model_to_string(model)?)
}

/// An estimated codeword kernel `pi(y, h | h')`, stored as `[h'][y][h]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorFile {
    pub states: usize,
    pub symbols: usize,
    #[serde(default)]
    pub initial: usize,
    pub table: Vec<f64>,
}

impl PriorFile {
    pub fn from_kernel(kernel: &HmmKernel) -> Self {
        Self {
            states: kernel.states(),
            symbols: kernel.symbols(),
            initial: kernel.initial(),
            table: kernel.table().to_vec(),
        }
    }

    pub fn build(&self) -> Result<HmmKernel> {
        Ok(HmmKernel::new("prior", self.states, self.symbols, self.initial, self.table.clone())?)
    }
}

pub fn load_prior(path: impl AsRef<Path>) -> Result<HmmKernel> {
    let path = path.as_ref();
    parse::<PriorFile>(&read(path)?, &path.display().to_string())?.build()
}

pub fn save_prior(kernel: &HmmKernel, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &render(&PriorFile::from_kernel(kernel))?)
}

/// A codebook with each word written as a string of decimal digits, so
/// alphabets are limited to ten symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookFile {
    pub rate: f64,
    pub seed: u64,
    pub words: Vec<String>,
}

pub fn word_to_string(word: &[u8]) -> Result<String> {
    word.iter()
        .map(|&s| {
            char::from_digit(s as u32, 10).ok_or_else(|| Error::Validation(format!("symbol {s} needs more than one digit")))
        })
        .collect()
}

pub fn word_from_str(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::Validation(format!("invalid symbol {c:?} in {text:?}")))
        })
        .collect()
}

impl CodebookFile {
    pub fn from_codebook(codebook: &Codebook) -> Result<Self> {
        Ok(Self {
            rate: codebook.rate,
            seed: codebook.seed,
            words: codebook.words.iter().map(|w| word_to_string(w)).collect::<Result<_>>()?,
        })
    }

    pub fn build(&self) -> Result<Codebook> {
        let words = self.words.iter().map(|w| word_from_str(w)).collect::<Result<Vec<_>>>()?;
        Ok(Codebook::from_words(words, self.rate, self.seed)?)
    }
}

pub fn load_codebook(path: impl AsRef<Path>) -> Result<Codebook> {
    let path = path.as_ref();
    parse::<CodebookFile>(&read(path)?, &path.display().to_string())?.build()
}

pub fn save_codebook(codebook: &Codebook, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &render(&CodebookFile::from_codebook(codebook)?)?)
}
