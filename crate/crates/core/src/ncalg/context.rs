use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LetterClass {
    A,
    X,
}

/// A formally symmetric letter. `index` counts position within its class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub name: String,
    pub class: LetterClass,
    pub index: usize,
}

/// Ordered list of letters; a letter's id is its position in the list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarContext {
    letters: Vec<Letter>,
}

impl VarContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Context with the given a-class names followed by the x-class names.
    pub fn with_names(a: &[&str], x: &[&str]) -> Result<Self> {
        let mut ctx = Self::new();
        for n in a {
            ctx.push(n, LetterClass::A)?;
        }
        for n in x {
            ctx.push(n, LetterClass::X)?;
        }
        Ok(ctx)
    }

    /// Context with x-class letters only.
    pub fn x_only(names: &[&str]) -> Result<Self> {
        Self::with_names(&[], names)
    }

    pub fn push(&mut self, name: &str, class: LetterClass) -> Result<usize> {
        if !is_identifier(name) {
            return Err(Error::Context(format!("invalid letter name `{name}`")));
        }
        if name == "i" {
            return Err(Error::Context("`i` is reserved for the imaginary unit".into()));
        }
        if self.id(name).is_some() {
            return Err(Error::Context(format!("duplicate letter `{name}`")));
        }
        let index = self.count(class);
        self.letters.push(Letter { name: name.to_string(), class, index });
        Ok(self.letters.len() - 1)
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l.name == name)
    }

    pub fn letter(&self, id: usize) -> &Letter {
        &self.letters[id]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn count(&self, class: LetterClass) -> usize {
        self.letters.iter().filter(|l| l.class == class).count()
    }

    pub fn a_count(&self) -> usize {
        self.count(LetterClass::A)
    }

    pub fn x_count(&self) -> usize {
        self.count(LetterClass::X)
    }

    /// Id of the `index`-th letter of `class`.
    pub fn id_of(&self, class: LetterClass, index: usize) -> Option<usize> {
        self.letters.iter().position(|l| l.class == class && l.index == index)
    }

    pub fn names(&self, class: LetterClass) -> Vec<String> {
        self.letters.iter().filter(|l| l.class == class).map(|l| l.name.clone()).collect()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut ch = s.chars();
    match ch.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
