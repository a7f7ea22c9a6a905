//! Display metadata for resources, kept apart from the election itself.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::election::{ApprovalElection, ResourceId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub title: String,
    pub genres: Vec<String>,
}

impl CatalogEntry {
    pub fn first_genre(&self) -> Option<&str> {
        self.genres.first().map(String::as_str)
    }
}

/// Outcome of resolving user text to a resource.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    Found(ResourceId),
    /// No unique match; up to five candidate titles, as ids.
    NotFound { suggestions: Vec<ResourceId> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Catalog {
    entries: BTreeMap<ResourceId, CatalogEntry>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: ResourceId, entry: CatalogEntry) {
        self.entries.insert(id, entry);
    }

    pub fn get(&self, id: ResourceId) -> Option<&CatalogEntry> {
        self.entries.get(&id)
    }

    pub fn title(&self, id: ResourceId) -> String {
        self.get(id)
            .map_or_else(|| format!("#{id}"), |e| e.title.clone())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ResourceId, &CatalogEntry)> {
        self.entries.iter().map(|(&id, e)| (id, e))
    }

    /// Keeps only entries for resources of `election`, adding a placeholder
    /// for any resource the catalog does not know. Returns the number of
    /// placeholders added.
    pub fn restrict_to(&mut self, election: &ApprovalElection) -> usize {
        self.entries.retain(|id, _| election.contains(*id));
        let mut added = 0;
        for &id in election.resources() {
            self.entries.entry(id).or_insert_with(|| {
                added += 1;
                CatalogEntry {
                    title: format!("#{id}"),
                    genres: Vec::new(),
                }
            });
        }
        added
    }

    /// Ids whose title contains `needle`, case-insensitively, in id order.
    pub fn search(&self, needle: &str) -> Vec<ResourceId> {
        let needle = needle.to_lowercase();
        self.entries
            .iter()
            .filter(|(_, e)| e.title.to_lowercase().contains(&needle))
            .map(|(&id, _)| id)
            .collect()
    }

    /// Resolves a numeric id, an exact title, or a unique case-insensitive
    /// title substring.
    pub fn resolve(&self, text: &str) -> Resolution {
        let text = text.trim();
        if let Ok(raw) = text.parse::<u32>() {
            let id = ResourceId(raw);
            if self.entries.contains_key(&id) {
                return Resolution::Found(id);
            }
        }
        if let Some((&id, _)) = self.entries.iter().find(|(_, e)| e.title == text) {
            return Resolution::Found(id);
        }
        let matches = self.search(text);
        if matches.len() == 1 {
            return Resolution::Found(matches[0]);
        }
        let suggestions = if matches.is_empty() {
            self.suggest(text)
        } else {
            matches.into_iter().take(5).collect()
        };
        Resolution::NotFound { suggestions }
    }

    /// Up to five titles sharing a word with `text`, case-insensitively.
    fn suggest(&self, text: &str) -> Vec<ResourceId> {
        let words: Vec<String> = text
            .to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| w.len() >= 3)
            .map(str::to_owned)
            .collect();
        self.entries
            .iter()
            .filter(|(_, e)| {
                let title = e.title.to_lowercase();
                words.iter().any(|w| title.contains(w.as_str()))
            })
            .map(|(&id, _)| id)
            .take(5)
            .collect()
    }
}
