//! Application → category registry used for knowledge complexity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_CATEGORIES: &[(&str, &[&str])] = &[
    (
        "Social Communication",
        &["Zoom Workplace", "Skype", "People", "Mail"],
    ),
    (
        "Multimedia Playback",
        &["Media Player", "Spotify", "Photos", "TuneIn"],
    ),
    (
        "Multimedia Editing",
        &[
            "Adobe Photoshop Express",
            "Microsoft Clipchamp",
            "paint.net",
            "Openshot",
            "Handbrake",
            "Paint",
        ],
    ),
    ("Office", &["Word", "PowerPoint", "Excel"]),
    (
        "Utility Tools",
        &[
            "Calculator",
            "7-Zip",
            "PDF24",
            "Power Automate",
            "Wikipedia",
            "BreeZip",
            "Maps",
            "Calendar",
            "Zotero",
            "DeepL",
        ],
    ),
    (
        "Programming",
        &["Visual Studio Code", "Cursor", "Windows PowerShell ISE"],
    ),
    (
        "System Management",
        &[
            "File Explorer",
            "Settings",
            "Control Panel",
            "Microsoft Store",
        ],
    ),
    ("Web Browsing", &["Google Chrome", "Microsoft Edge"]),
    (
        "Screen Capture",
        &["Record Screen", "Snipping Tool", "OBS Studio", "ShareX"],
    ),
    ("Task Management", &["Microsoft To Do", "Todoist", "Notion"]),
    (
        "Note Management",
        &["Evernote", "OneNote", "Sticky Notes", "Sticky Notes (New)"],
    ),
    ("Lifestyle", &["Recipe Keeper", "paisa"]),
];

/// Maps each application to exactly one category.
///
/// Serialized as `{"categories": {"<category>": ["<app>", ...]}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppCategoryRegistry {
    by_app: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RegistryFile {
    categories: BTreeMap<String, Vec<String>>,
}

impl AppCategoryRegistry {
    pub fn new() -> Self {
        Self {
            by_app: BTreeMap::new(),
        }
    }

    /// Adds an application. An application already mapped to a different category is an error.
    pub fn insert(&mut self, app: impl Into<String>, category: impl Into<String>) -> Result<()> {
        let app = app.into();
        let category = category.into();
        match self.by_app.get(&app) {
            Some(existing) if *existing != category => Err(Error::Config(format!(
                "application `{app}` listed under both `{existing}` and `{category}`"
            ))),
            _ => {
                self.by_app.insert(app, category);
                Ok(())
            }
        }
    }

    pub fn category_of(&self, app: &str) -> Result<&str> {
        self.by_app
            .get(app)
            .map(String::as_str)
            .ok_or_else(|| Error::UnregisteredApplication(app.to_string()))
    }

    pub fn applications(&self) -> impl Iterator<Item = (&str, &str)> {
        self.by_app.iter().map(|(a, c)| (a.as_str(), c.as_str()))
    }

    pub fn categories(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (app, cat) in &self.by_app {
            out.entry(cat.as_str()).or_default().push(app.as_str());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.by_app.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_app.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RegistryFile = serde_json::from_str(text)?;
        let mut registry = Self::new();
        for (category, apps) in file.categories {
            for app in apps {
                registry.insert(app, category.clone())?;
            }
        }
        Ok(registry)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let categories = self
            .categories()
            .into_iter()
            .map(|(c, apps)| (c.to_string(), apps.into_iter().map(String::from).collect()))
            .collect();
        serde_json::to_value(RegistryFile { categories }).expect("registry serializes")
    }
}

impl Default for AppCategoryRegistry {
    /// The 12 categories and 49 desktop applications of the reference environment.
    fn default() -> Self {
        let mut registry = Self::new();
        for (category, apps) in DEFAULT_CATEGORIES {
            for app in *apps {
                registry
                    .insert(*app, *category)
                    .expect("default registry has no conflicts");
            }
        }
        registry
    }
}
