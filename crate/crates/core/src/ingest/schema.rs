use std::{
    collections::{BTreeSet, HashSet},
    fs,
    path::Path,
};

use serde::Deserialize;
use thiserror::Error;

use crate::engine::{DataType, Role};

const DEFAULT_SCHEMA: &str = include_str!("../../assets/default_schema.toml");

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("schema does not bind required role {0:?}")]
    MissingRole(Role),
    #[error("role {0:?} is bound to more than one field")]
    DuplicateRole(Role),
    #[error("duplicate field name {0:?}")]
    DuplicateField(String),
    #[error("role {role:?} needs a {expected} field, but {field:?} is {found}")]
    RoleType {
        role: Role,
        field: String,
        expected: DataType,
        found: DataType,
    },
    #[error("cannot read schema {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SemanticType {
    Text,
    Integer,
    Year,
    Money,
}

impl From<SemanticType> for DataType {
    fn from(t: SemanticType) -> Self {
        match t {
            SemanticType::Text => DataType::Text,
            SemanticType::Integer => DataType::Integer,
            SemanticType::Year => DataType::Year,
            SemanticType::Money => DataType::Money,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    required_roles: Option<Vec<Role>>,
    #[serde(default)]
    field: Vec<FieldDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    name: String,
    #[serde(rename = "type")]
    semantic_type: SemanticType,
    role: Option<Role>,
    #[serde(default)]
    nullable: bool,
    #[serde(default)]
    aliases: Vec<String>,
}

/// How one CSV column is read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub name: String,
    pub data_type: DataType,
    pub role: Option<Role>,
    pub nullable: bool,
    pub aliases: Vec<String>,
}

impl FieldSpec {
    /// Header names accepted for this field, canonical name first.
    pub fn header_names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.name.as_str()).chain(self.aliases.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    fields: Vec<FieldSpec>,
    required_roles: BTreeSet<Role>,
}

impl ColumnSchema {
    /// The schema shipped with the crate, binding the seven analysis roles.
    pub fn bundled() -> Self {
        load_schema(DEFAULT_SCHEMA).expect("bundled schema is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, SchemaError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| SchemaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        load_schema(&text)
    }

    pub fn fields(&self) -> &[FieldSpec] {
        &self.fields
    }

    pub fn required_roles(&self) -> &BTreeSet<Role> {
        &self.required_roles
    }

    pub fn field_for_role(&self, role: Role) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.role == Some(role))
    }
}

fn expected_type(role: Role) -> DataType {
    match role {
        Role::Year => DataType::Year,
        Role::Cost => DataType::Money,
        _ => DataType::Text,
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Parses and validates a schema document.
pub fn load_schema(document: &str) -> Result<ColumnSchema, SchemaError> {
    let doc: SchemaDoc = toml::from_str(document).map_err(|e| SchemaError::Syntax {
        line: e.span().map_or(1, |s| line_of(document, s.start)),
        message: e.message().to_string(),
    })?;

    let mut names = HashSet::new();
    let mut bound = BTreeSet::new();
    let mut fields = Vec::with_capacity(doc.field.len());
    for f in doc.field {
        let spec = FieldSpec {
            name: f.name,
            data_type: f.semantic_type.into(),
            role: f.role,
            nullable: f.nullable,
            aliases: f.aliases,
        };
        for header in spec.header_names() {
            if !names.insert(header.to_string()) {
                return Err(SchemaError::DuplicateField(header.to_string()));
            }
        }
        if let Some(role) = spec.role {
            if !bound.insert(role) {
                return Err(SchemaError::DuplicateRole(role));
            }
            let expected = expected_type(role);
            if spec.data_type != expected {
                return Err(SchemaError::RoleType {
                    role,
                    field: spec.name.clone(),
                    expected,
                    found: spec.data_type,
                });
            }
        }
        fields.push(spec);
    }

    let required_roles: BTreeSet<Role> = match doc.required_roles {
        Some(roles) => roles.into_iter().collect(),
        None => Role::ALL.into_iter().collect(),
    };
    if let Some(missing) = required_roles.iter().find(|r| !bound.contains(r)) {
        return Err(SchemaError::MissingRole(*missing));
    }

    Ok(ColumnSchema {
        fields,
        required_roles,
    })
}
