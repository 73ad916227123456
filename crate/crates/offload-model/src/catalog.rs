//! Catalog of controller communication interfaces and their minimum update
//! times, keyed by device, interface, protocol variant, and payload class.
//!
//! Update times are carried as decimal strings in the data files and parsed
//! exactly once, so reloading a serialized catalog reproduces the strings
//! bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("protocol variant {variant} does not belong to interface {interface}")]
    InvalidKey {
        interface: Interface,
        variant: ProtocolVariant,
    },
    #[error("unknown device: {device_id}")]
    DeviceNotFound { device_id: String },
    #[error("interface unsupported: no {interface}/{variant} update time for {device_id}")]
    InterfaceUnsupported {
        device_id: String,
        interface: Interface,
        variant: ProtocolVariant,
    },
    #[error("catalog data error: {0}")]
    Data(String),
}

string_enum! {
    /// Communication interface family of a controller.
    Interface {
        Ouc => "ouc",
        Libnodave => "libnodave",
        OpcUaServerClient => "opcua_server_client",
        OpcUaPubSub => "opcua_pubsub",
    }
}

string_enum! {
    /// Concrete protocol under an interface.
    ProtocolVariant {
        Udp => "udp",
        Tcp => "tcp",
        IsoOnTcp => "iso_on_tcp",
        UatcpWrite => "uatcp_write",
        UatcpRead => "uatcp_read",
        Uadp => "uadp",
    }
}

impl ProtocolVariant {
    /// The interface each variant belongs to.
    pub fn interface(self) -> Interface {
        match self {
            ProtocolVariant::Udp | ProtocolVariant::Tcp => Interface::Ouc,
            ProtocolVariant::IsoOnTcp => Interface::Libnodave,
            ProtocolVariant::UatcpWrite | ProtocolVariant::UatcpRead => {
                Interface::OpcUaServerClient
            }
            ProtocolVariant::Uadp => Interface::OpcUaPubSub,
        }
    }
}

/// Number of 4-byte data values per message. The set is closed; there is no
/// interpolation law between classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum PayloadClass {
    One,
    Ten,
    Hundred,
}

impl PayloadClass {
    pub const ALL: [PayloadClass; 3] = [PayloadClass::One, PayloadClass::Ten, PayloadClass::Hundred];

    pub fn value(self) -> u32 {
        match self {
            PayloadClass::One => 1,
            PayloadClass::Ten => 10,
            PayloadClass::Hundred => 100,
        }
    }
}

impl TryFrom<u32> for PayloadClass {
    type Error = String;
    fn try_from(v: u32) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(PayloadClass::One),
            10 => Ok(PayloadClass::Ten),
            100 => Ok(PayloadClass::Hundred),
            other => Err(format!("unsupported payload class {other}: must be 1, 10, or 100")),
        }
    }
}

impl From<PayloadClass> for u32 {
    fn from(c: PayloadClass) -> u32 {
        c.value()
    }
}

impl fmt::Display for PayloadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Full address of one update-time reading.
///
/// Field order matters: the derived ordering groups a device's keys and then
/// sorts them by (interface, variant, payload class), which is the listing
/// order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InterfaceKey {
    pub device_id: String,
    pub interface: Interface,
    pub protocol_variant: ProtocolVariant,
    pub payload_class: PayloadClass,
}

impl InterfaceKey {
    pub fn new(
        device_id: impl Into<String>,
        interface: Interface,
        protocol_variant: ProtocolVariant,
        payload_class: PayloadClass,
    ) -> Self {
        Self {
            device_id: device_id.into(),
            interface,
            protocol_variant,
            payload_class,
        }
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        if self.protocol_variant.interface() != self.interface {
            return Err(CatalogError::InvalidKey {
                interface: self.interface,
                variant: self.protocol_variant,
            });
        }
        Ok(())
    }
}

impl fmt::Display for InterfaceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} on {} ({} data values)",
            self.interface, self.protocol_variant, self.device_id, self.payload_class
        )
    }
}

/// One catalog reading.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateTimeEntry {
    pub key: InterfaceKey,
    /// Minimum update time in milliseconds, parsed from `t_update_ms_str`.
    pub t_update_ms: f64,
    /// Verbatim decimal string from the data file.
    pub t_update_ms_str: String,
    pub estimated: bool,
    pub note: Option<String>,
}

impl UpdateTimeEntry {
    pub fn t_update_us(&self) -> f64 {
        self.t_update_ms * 1_000.0
    }
}

/// Immutable after load; lookups are read-only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateTimeCatalog {
    entries: BTreeMap<InterfaceKey, UpdateTimeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[serde(default)]
    update_time: RawTree,
}

type RawTree = BTreeMap<String, BTreeMap<String, BTreeMap<String, BTreeMap<String, RawEntry>>>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    t_update_ms: String,
    #[serde(default, skip_serializing_if = "is_false")]
    estimated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn is_false(v: &bool) -> bool {
    !v
}

impl UpdateTimeCatalog {
    pub fn from_toml_str(text: &str) -> Result<Self, CatalogError> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| CatalogError::Data(e.to_string()))?;
        Self::from_raw(file.update_time)
    }

    fn from_raw(tree: RawTree) -> Result<Self, CatalogError> {
        let mut entries = BTreeMap::new();
        for (device_id, interfaces) in tree {
            for (interface, variants) in interfaces {
                let interface =
                    Interface::from_str(&interface).map_err(CatalogError::Data)?;
                for (variant, classes) in variants {
                    let variant =
                        ProtocolVariant::from_str(&variant).map_err(CatalogError::Data)?;
                    for (class, raw) in classes {
                        let class: u32 = class.parse().map_err(|_| {
                            CatalogError::Data(format!("invalid payload class key: {class}"))
                        })?;
                        let key = InterfaceKey::new(
                            device_id.clone(),
                            interface,
                            variant,
                            PayloadClass::try_from(class).map_err(CatalogError::Data)?,
                        );
                        key.validate()?;
                        let t_update_ms: f64 = raw.t_update_ms.parse().map_err(|_| {
                            CatalogError::Data(format!(
                                "unparseable t_update_ms {:?} for {key}",
                                raw.t_update_ms
                            ))
                        })?;
                        if !(t_update_ms > 0.0) {
                            return Err(CatalogError::Data(format!(
                                "t_update_ms must be > 0 for {key}"
                            )));
                        }
                        entries.insert(
                            key.clone(),
                            UpdateTimeEntry {
                                key,
                                t_update_ms,
                                t_update_ms_str: raw.t_update_ms,
                                estimated: raw.estimated,
                                note: raw.note,
                            },
                        );
                    }
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn to_toml_string(&self) -> String {
        let mut tree: RawTree = BTreeMap::new();
        for entry in self.entries.values() {
            let k = &entry.key;
            tree.entry(k.device_id.clone())
                .or_default()
                .entry(k.interface.to_string())
                .or_default()
                .entry(k.protocol_variant.to_string())
                .or_default()
                .insert(
                    k.payload_class.to_string(),
                    RawEntry {
                        t_update_ms: entry.t_update_ms_str.clone(),
                        estimated: entry.estimated,
                        note: entry.note.clone(),
                    },
                );
        }
        toml::to_string(&CatalogFile { update_time: tree })
            .expect("catalog serialization cannot fail")
    }

    /// Overlay `other`'s entries on top of this catalog.
    pub fn merge(&mut self, other: UpdateTimeCatalog) {
        self.entries.extend(other.entries);
    }

    pub fn lookup_update_time(&self, key: &InterfaceKey) -> Result<&UpdateTimeEntry, CatalogError> {
        key.validate()?;
        if let Some(entry) = self.entries.get(key) {
            return Ok(entry);
        }
        if !self.knows_device(&key.device_id) {
            return Err(CatalogError::DeviceNotFound {
                device_id: key.device_id.clone(),
            });
        }
        Err(CatalogError::InterfaceUnsupported {
            device_id: key.device_id.clone(),
            interface: key.interface,
            variant: key.protocol_variant,
        })
    }

    /// All keys recorded for a device, ordered by (interface, variant,
    /// payload class).
    pub fn list_supported(&self, device_id: &str) -> Result<Vec<InterfaceKey>, CatalogError> {
        if !self.knows_device(device_id) {
            return Err(CatalogError::DeviceNotFound {
                device_id: device_id.to_string(),
            });
        }
        Ok(self
            .entries
            .keys()
            .filter(|k| k.device_id == device_id)
            .cloned()
            .collect())
    }

    pub fn knows_device(&self, device_id: &str) -> bool {
        self.entries.keys().any(|k| k.device_id == device_id)
    }

    /// True when the device has at least one reading for the variant.
    pub fn supports_variant(&self, device_id: &str, variant: ProtocolVariant) -> bool {
        self.entries
            .keys()
            .any(|k| k.device_id == device_id && k.protocol_variant == variant)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &UpdateTimeEntry> {
        self.entries.values()
    }
}
