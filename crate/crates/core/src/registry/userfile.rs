//! User-supplied registry files.
//!
//! Format (JSON, versioned):
//!
//! ```json
//! {
//!   "format": 1,
//!   "identities": [
//!     { "id": "my_check", "lhs": "eta(1)", "rhs": "poch(1,1)", "order": 64 }
//!   ]
//! }
//! ```
//!
//! `lhs` and `rhs` are expressions in the text DSL (see the `dsl` module);
//! `order` is that identity's default verification order and may be omitted.
//! Ids must be unique within the file and must not shadow built-in ids.

use serde::Deserialize;
use thiserror::Error;

use super::IdentityEntry;

pub const USER_REGISTRY_FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum UserRegistryError {
    #[error("failed to read registry file: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported registry format {found} (expected {USER_REGISTRY_FORMAT})")]
    Format { found: u32 },
    #[error("identity {id:?}: failed to parse {side}: {message} at byte {position}")]
    BadExpression {
        id: String,
        side: &'static str,
        position: usize,
        message: String,
    },
    #[error("duplicate identity id {0:?} in registry file")]
    DuplicateId(String),
    #[error("identity id {0:?} shadows a built-in entry")]
    ShadowsBuiltin(String),
}

#[derive(Debug, Deserialize)]
struct FileSchema {
    format: u32,
    identities: Vec<IdentitySchema>,
}

#[derive(Debug, Deserialize)]
struct IdentitySchema {
    id: String,
    lhs: String,
    rhs: String,
    #[serde(default)]
    order: Option<usize>,
}

/// A parsed user identity: the entry plus its per-file default order.
#[derive(Debug, Clone)]
pub struct UserIdentity {
    pub entry: IdentityEntry,
    pub default_order: Option<usize>,
}

/// Loads and validates a user registry file, rejecting unknown format
/// versions, duplicate ids and ids that shadow built-ins.
pub fn load_user_registry(path: &std::path::Path) -> Result<Vec<UserIdentity>, UserRegistryError> {
    let text = std::fs::read_to_string(path)?;
    let file: FileSchema = serde_json::from_str(&text)?;
    if file.format != USER_REGISTRY_FORMAT {
        return Err(UserRegistryError::Format {
            found: file.format,
        });
    }
    let builtin_ids: std::collections::BTreeSet<String> = super::builtin_registry()
        .into_iter()
        .map(|e| e.id)
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for ident in file.identities {
        if !seen.insert(ident.id.clone()) {
            return Err(UserRegistryError::DuplicateId(ident.id));
        }
        if builtin_ids.contains(&ident.id) {
            return Err(UserRegistryError::ShadowsBuiltin(ident.id));
        }
        let parse_side = |side: &'static str, text: &str| {
            crate::dsl::parse(text).map_err(|e| UserRegistryError::BadExpression {
                id: ident.id.clone(),
                side,
                position: e.position,
                message: e.message(),
            })
        };
        let lhs = parse_side("lhs", &ident.lhs)?.to_expr();
        let rhs = parse_side("rhs", &ident.rhs)?.to_expr();
        out.push(UserIdentity {
            entry: IdentityEntry {
                id: ident.id,
                lhs,
                rhs,
                citation: format!("user registry file {}", path.display()),
                limit_meta: None,
            },
            default_order: ident.order,
        });
    }
    Ok(out)
}
