//! Named strategy registries, selected at runtime by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::characters::{AbelianCharacters, BurnsideCharacters, CharacterMethod};
use crate::error::{Error, Result};
use crate::positivity::{EigenPositivity, LdlPositivity, PositivityMethod};

pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers a strategy under its own name, replacing any previous entry.
    pub fn register(&mut self, strategy: Arc<T>) -> &mut Self {
        self.entries.insert(strategy.name(), strategy);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

pub fn positivity_methods() -> Registry<dyn PositivityMethod> {
    let mut r: Registry<dyn PositivityMethod> = Registry::new("positivity");
    r.register(Arc::new(LdlPositivity))
        .register(Arc::new(EigenPositivity));
    r
}

pub fn character_methods() -> Registry<dyn CharacterMethod> {
    let mut r: Registry<dyn CharacterMethod> = Registry::new("character");
    r.register(Arc::new(BurnsideCharacters))
        .register(Arc::new(AbelianCharacters));
    r
}

/// Strategies and seed shared by one computation.
#[derive(Clone)]
pub struct Engine {
    pub positivity: Arc<dyn PositivityMethod>,
    pub characters: Arc<dyn CharacterMethod>,
    pub seed: u64,
}

impl Engine {
    pub const DEFAULT_SEED: u64 = 0x5eed;

    /// Exact LDL positivity with Burnside character tables.
    pub fn exact(seed: u64) -> Self {
        Engine {
            positivity: Arc::new(LdlPositivity),
            characters: Arc::new(BurnsideCharacters),
            seed,
        }
    }

    pub fn float(seed: u64) -> Self {
        Engine {
            positivity: Arc::new(EigenPositivity),
            ..Engine::exact(seed)
        }
    }

    pub fn from_names(positivity: &str, characters: &str, seed: u64) -> Result<Self> {
        Ok(Engine {
            positivity: positivity_methods().get(positivity)?,
            characters: character_methods().get(characters)?,
            seed,
        })
    }
}

impl Default for Engine {
    fn default() -> Self {
        Engine::exact(Engine::DEFAULT_SEED)
    }
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("positivity", &self.positivity.name())
            .field("characters", &self.characters.name())
            .field("seed", &self.seed)
            .finish()
    }
}
