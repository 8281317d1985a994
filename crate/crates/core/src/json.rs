//! Number formatting shared by the file formats.

use serde::Serialize;
use serde_json::value::RawValue;

/// A real printed with 17 significant digits so it survives a text round trip bit-exactly.
#[derive(Debug, Clone, Copy)]
pub struct Sig17(pub f64);

impl Sig17 {
    pub fn text(self) -> String {
        format!("{:.16e}", self.0)
    }
}

impl Serialize for Sig17 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(self.text()).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Serialize)]
pub(crate) struct EntryOut<'a> {
    pub coords: &'a [i64],
    pub value: Sig17,
}
