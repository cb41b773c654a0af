use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::ZslError;
use crate::el_embed::EmbeddingSpace;
use crate::ontology::Ontology;
use crate::text_walk::{word_encoding, WordVectors};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    /// Center of the class concept's ball.
    ElCenter,
    /// Mean word vector of the class name's tokens.
    Word,
    /// Row of the attribute table.
    Attribute,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::ElCenter => "EL_CENTER",
            Component::Word => "WORD",
            Component::Attribute => "ATTRIBUTE",
        })
    }
}

impl FromStr for Component {
    type Err = ZslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EL_CENTER" => Ok(Component::ElCenter),
            "WORD" => Ok(Component::Word),
            "ATTRIBUTE" => Ok(Component::Attribute),
            _ => Err(ZslError::InvalidConfig(format!("unknown encoding component `{s}`"))),
        }
    }
}

/// Parses a `+`- or `,`-separated component list such as `EL_CENTER+WORD`.
pub fn parse_components(s: &str) -> Result<Vec<Component>, ZslError> {
    let v: Vec<Component> = s
        .split(['+', ','])
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err(ZslError::InvalidConfig("component list is empty".into()));
    }
    Ok(v)
}

pub fn components_to_string(c: &[Component]) -> String {
    c.iter().map(Component::to_string).collect::<Vec<_>>().join("+")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeOptions {
    pub components: Vec<Component>,
    /// Scale each component block to unit L2 norm before concatenation.
    pub normalize: bool,
    /// Append the ball radius to the center block.
    pub include_radius: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { components: vec![Component::ElCenter], normalize: true, include_radius: false }
    }
}

/// Class label → attribute vector, all of one length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributeTable {
    pub dim: usize,
    pub rows: BTreeMap<String, Vec<f64>>,
}

/// Inputs the components draw from. Only those needed by the requested
/// components have to be present.
#[derive(Debug, Clone, Copy, Default)]
pub struct EncodingSources<'a> {
    /// Class label → concept name.
    pub class_map: Option<&'a BTreeMap<String, String>>,
    pub space: Option<&'a EmbeddingSpace>,
    pub words: Option<(&'a WordVectors, &'a Ontology)>,
    pub attributes: Option<&'a AttributeTable>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingTable {
    pub components: Vec<Component>,
    /// Length of each component block, in component order.
    pub dims: Vec<usize>,
    pub encodings: BTreeMap<String, Vec<f64>>,
}

impl EncodingTable {
    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn get(&self, label: &str) -> Option<&[f64]> {
        self.encodings.get(label).map(Vec::as_slice)
    }

    /// Header `#components<TAB>EL_CENTER+WORD<TAB>n,d`, then `label<TAB>v1,...,vm`
    /// rows with 17 significant digits.
    pub fn to_tsv(&self) -> String {
        let dims: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        let mut out = format!(
            "#components\t{}\t{}\n",
            components_to_string(&self.components),
            dims.join(",")
        );
        for (label, z) in &self.encodings {
            let values: Vec<String> = z.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&format!("{label}\t{}\n", values.join(",")));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, ZslError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let bad_header = || ZslError::format(1, "expected `#components<TAB>list<TAB>dims`");
        let (_, header) = lines.next().ok_or_else(bad_header)?;
        let fields: Vec<&str> = header.split('\t').collect();
        let [tag, list, dims] = fields[..] else { return Err(bad_header()) };
        if tag != "#components" {
            return Err(bad_header());
        }
        let components = parse_components(list)?;
        let dims: Vec<usize> = dims
            .split(',')
            .map(|d| d.trim().parse().map_err(|_| bad_header()))
            .collect::<Result<_, _>>()?;
        if dims.len() != components.len() {
            return Err(bad_header());
        }
        let m: usize = dims.iter().sum();
        let mut encodings = BTreeMap::new();
        for (i, line) in lines {
            let (label, z) = parse_vector_row(line, i + 1)?;
            if z.len() != m {
                return Err(ZslError::format(i + 1, format!("`{label}` has {} values, expected {m}", z.len())));
            }
            encodings.insert(label, z);
        }
        Ok(EncodingTable { components, dims, encodings })
    }
}

/// `label<TAB>v1,...,vk` → `(label, v)`.
pub(crate) fn parse_vector_row(line: &str, line_no: usize) -> Result<(String, Vec<f64>), ZslError> {
    let (label, values) = line
        .split_once('\t')
        .ok_or_else(|| ZslError::format(line_no, "expected `label<TAB>values`"))?;
    let v = parse_values(values, line_no)?;
    Ok((label.to_string(), v))
}

pub(crate) fn parse_values(values: &str, line_no: usize) -> Result<Vec<f64>, ZslError> {
    values
        .split(',')
        .map(|x| {
            x.trim().parse::<f64>().map_err(|_| ZslError::format(line_no, format!("`{x}` is not a number")))
        })
        .collect()
}

pub fn read_class_map(text: &str) -> Result<BTreeMap<String, String>, ZslError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, concept) = line
            .split_once('\t')
            .ok_or_else(|| ZslError::format(i + 1, "expected `label<TAB>concept`"))?;
        if map.insert(label.to_string(), concept.trim().to_string()).is_some() {
            return Err(ZslError::format(i + 1, format!("label `{label}` mapped twice")));
        }
    }
    Ok(map)
}

pub fn write_class_map(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(l, c)| format!("{l}\t{c}\n")).collect()
}

pub fn read_attributes(text: &str) -> Result<AttributeTable, ZslError> {
    let mut table = AttributeTable::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, v) = parse_vector_row(line, i + 1)?;
        if table.rows.is_empty() {
            table.dim = v.len();
        } else if v.len() != table.dim {
            return Err(ZslError::format(
                i + 1,
                format!("`{label}` has {} attributes, expected {}", v.len(), table.dim),
            ));
        }
        if table.rows.insert(label.clone(), v).is_some() {
            return Err(ZslError::format(i + 1, format!("label `{label}` listed twice")));
        }
    }
    Ok(table)
}

pub fn write_attributes(t: &AttributeTable) -> String {
    t.rows
        .iter()
        .map(|(l, v)| {
            let values: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
            format!("{l}\t{}\n", values.join(","))
        })
        .collect()
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

fn block(
    label: &str,
    c: Component,
    src: &EncodingSources<'_>,
    opts: &EncodeOptions,
) -> Result<Vec<f64>, ZslError> {
    let missing = |what: &str| ZslError::UnknownLabel { label: label.to_string(), what: what.to_string() };
    let concept = || -> Result<&str, ZslError> {
        src.class_map
            .ok_or_else(|| missing("class map"))?
            .get(label)
            .map(String::as_str)
            .ok_or_else(|| missing("class map entry"))
    };
    match c {
        Component::ElCenter => {
            let space = src.space.ok_or_else(|| missing("concept embedding"))?;
            let ball = space.concept(concept()?).ok_or_else(|| missing("concept embedding"))?;
            let mut v = ball.center.clone();
            if opts.include_radius {
                v.push(ball.radius);
            }
            Ok(v)
        }
        Component::Word => {
            let (wv, o) = src.words.ok_or_else(|| missing("word vectors"))?;
            let name = src.class_map.and_then(|m| m.get(label)).map_or(label, String::as_str);
            word_encoding(name, wv, o).map_err(|_| missing("word vector"))
        }
        Component::Attribute => src
            .attributes
            .and_then(|a| a.rows.get(label))
            .cloned()
            .ok_or_else(|| missing("attribute row")),
    }
}

/// h(y) for every label: the requested component blocks, concatenated in order.
pub fn encode_labels<S: AsRef<str>>(
    labels: &[S],
    src: &EncodingSources<'_>,
    opts: &EncodeOptions,
) -> Result<EncodingTable, ZslError> {
    if opts.components.is_empty() {
        return Err(ZslError::InvalidConfig("component list is empty".into()));
    }
    let mut dims: Option<Vec<usize>> = None;
    let mut encodings = BTreeMap::new();
    for label in labels {
        let label = label.as_ref();
        let mut z = Vec::new();
        let mut these = Vec::with_capacity(opts.components.len());
        for &c in &opts.components {
            let b = block(label, c, src, opts)?;
            these.push(b.len());
            z.extend(if opts.normalize { unit(b) } else { b });
        }
        if *dims.get_or_insert_with(|| these.clone()) != these {
            return Err(ZslError::Dimension { expected: dims.unwrap().iter().sum(), found: z.len() });
        }
        encodings.insert(label.to_string(), z);
    }
    let dims = dims.unwrap_or_else(|| vec![0; opts.components.len()]);
    Ok(EncodingTable { components: opts.components.clone(), dims, encodings })
}
