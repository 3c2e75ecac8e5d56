//! The user store: real identities, credentials and the pseudonym each
//! maps to. Nothing here is ever copied into the content store.

use crate::error::AuthError;
use crate::store::{read_json, write_atomic};
use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::{Algorithm, Argon2, Params, Version};
use chrono::{DateTime, Utc};
use rats_core::{Role, UserId};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRecord {
    pub id: UserId,
    pub email: String,
    pub password_hash: String,
    pub role: Role,
    pub email_verified: bool,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub user: UserId,
    pub issued_at: DateTime<Utc>,
}

/// Tokens are stored as SHA-256 digests so a leaked file grants nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserData {
    next_id: u64,
    pub users: BTreeMap<UserId, UserRecord>,
    pub tokens: BTreeMap<String, TokenRecord>,
    pub verifications: BTreeMap<String, UserId>,
}

#[derive(Debug, Clone, Copy)]
pub struct HashCost {
    pub memory_kib: u32,
    pub iterations: u32,
}

pub fn hash_password(password: &str, cost: HashCost) -> anyhow::Result<String> {
    let params = Params::new(cost.memory_kib, cost.iterations, 1, None).map_err(|e| anyhow::anyhow!("{e}"))?;
    let salt = SaltString::encode_b64(&rand::random::<[u8; 16]>()).map_err(|e| anyhow::anyhow!("{e}"))?;
    let hash = Argon2::new(Algorithm::Argon2id, Version::V0x13, params)
        .hash_password(password.as_bytes(), &salt)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(hash.to_string())
}

/// Parameters are read from the hash itself.
pub fn verify_password(password: &str, hash: &str) -> bool {
    PasswordHash::new(hash)
        .map(|h| Argon2::default().verify_password(password.as_bytes(), &h).is_ok())
        .unwrap_or(false)
}

/// 256 random bits, hex encoded.
pub fn new_token() -> String {
    hex::encode(rand::random::<[u8; 32]>())
}

pub fn digest(token: &str) -> String {
    hex::encode(Sha256::digest(token.as_bytes()))
}

pub fn normalize_email(email: &str) -> Result<String, AuthError> {
    let email = email.trim().to_ascii_lowercase();
    let Some((local, domain)) = email.split_once('@') else {
        return Err(AuthError::InvalidEmail);
    };
    if local.is_empty() || domain.is_empty() || domain.contains('@') || !domain.contains('.') || email.contains(char::is_whitespace) {
        return Err(AuthError::InvalidEmail);
    }
    Ok(email)
}

#[derive(Debug)]
pub struct UserStore {
    dir: PathBuf,
    pub data: UserData,
}

impl UserStore {
    pub fn path(dir: &Path) -> PathBuf {
        dir.join("users.json")
    }

    pub fn migrate(dir: &Path) -> anyhow::Result<bool> {
        std::fs::create_dir_all(dir)?;
        let schema = serde_json::json!({
            "store": "users",
            "version": crate::store::SCHEMA_VERSION,
            "files": {
                "users.json": {
                    "users": ["id", "email", "password_hash", "role", "email_verified", "created_at"],
                    "tokens": ["user", "issued_at"],
                    "verifications": ["user"],
                },
            }
        });
        write_atomic(&dir.join("schema.json"), &serde_json::to_vec_pretty(&schema)?)?;
        if Self::path(dir).exists() {
            return Ok(false);
        }
        Self {
            dir: dir.to_owned(),
            data: UserData::default(),
        }
        .save()?;
        Ok(true)
    }

    pub fn open(dir: &Path) -> anyhow::Result<Self> {
        Ok(Self {
            dir: dir.to_owned(),
            data: read_json(&Self::path(dir))?.unwrap_or_default(),
        })
    }

    pub fn save(&self) -> anyhow::Result<()> {
        write_atomic(&Self::path(&self.dir), &serde_json::to_vec_pretty(&self.data)?)?;
        Ok(())
    }

    pub fn by_email(&self, email: &str) -> Option<&UserRecord> {
        self.data.users.values().find(|u| u.email == email)
    }

    pub fn get(&self, id: UserId) -> Option<&UserRecord> {
        self.data.users.get(&id)
    }

    /// Inserts an account; the caller has already checked policy and hashed.
    pub fn insert(&mut self, email: String, password_hash: String, role: Role, verified: bool, now: DateTime<Utc>) -> Result<UserId, AuthError> {
        if self.by_email(&email).is_some() {
            return Err(AuthError::EmailTaken);
        }
        self.data.next_id += 1;
        let id = UserId(self.data.next_id);
        self.data.users.insert(
            id,
            UserRecord {
                id,
                email,
                password_hash,
                role,
                email_verified: verified,
                created_at: now,
            },
        );
        Ok(id)
    }

    /// Returns the raw token to send; only its digest is kept.
    pub fn issue_verification(&mut self, user: UserId) -> String {
        let token = new_token();
        self.data.verifications.insert(digest(&token), user);
        token
    }

    pub fn verify(&mut self, token: &str) -> Result<UserId, AuthError> {
        let user = self.data.verifications.remove(&digest(token)).ok_or(AuthError::BadToken)?;
        let record = self.data.users.get_mut(&user).ok_or(AuthError::BadToken)?;
        record.email_verified = true;
        Ok(user)
    }

    pub fn issue_token(&mut self, user: UserId, now: DateTime<Utc>) -> String {
        let token = new_token();
        self.data.tokens.insert(digest(&token), TokenRecord { user, issued_at: now });
        token
    }

    pub fn authenticate(&self, token: &str) -> Option<&UserRecord> {
        let record = self.data.tokens.get(&digest(token))?;
        self.data.users.get(&record.user)
    }

    /// Drops every session of the user; returns how many there were.
    pub fn revoke_all(&mut self, user: UserId) -> usize {
        let before = self.data.tokens.len();
        self.data.tokens.retain(|_, t| t.user != user);
        before - self.data.tokens.len()
    }

    pub fn set_password_hash(&mut self, user: UserId, hash: String) -> bool {
        match self.data.users.get_mut(&user) {
            Some(u) => {
                u.password_hash = hash;
                true
            }
            None => false,
        }
    }

    pub fn set_role(&mut self, user: UserId, role: Role) -> bool {
        match self.data.users.get_mut(&user) {
            Some(u) => {
                u.role = role;
                true
            }
            None => false,
        }
    }

    /// Removes the identity row and its credentials. Content keyed by the
    /// pseudonym stays where it is.
    pub fn delete(&mut self, user: UserId) -> bool {
        self.revoke_all(user);
        self.data.verifications.retain(|_, u| *u != user);
        self.data.users.remove(&user).is_some()
    }
}
