//! Versioned binary model files.
//!
//! Layout: `"CSEM"`, format version (u32), kind tag (u8), payload, CRC-32 of
//! everything before it. Integers are little-endian; strings are a u32 byte
//! length followed by UTF-8; tensors are rank (u32), dims (u32 each) and
//! row-major f32 values. Tagger and classifier files carry their embedder
//! inline, so each file is self-contained.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::charlm::{CharLm, CharLmConfig, CharLmWeights, Direction};
use crate::classifier::{ClassifierConfig, ClassifierWeights, GruClassifier};
use crate::embed::{ContextualEmbedder, EmbedderPart, StackedEmbedder};
use crate::fit::FitConfig;
use crate::labels::LabelIndex;
use crate::numcore::{GruParams, LinearParams, LstmParams, Tensor};
use crate::tagger::{CrfTagger, TagSet, TaggerConfig, TaggerWeights};
use crate::textcorpus::{CharDictionary, StaticWordTable};
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CSEM";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 9;

/// Kind tag stored after the version.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum ModelKind {
    Dictionary = 1,
    CharLm = 2,
    Tagger = 3,
    Classifier = 4,
    StaticTable = 5,
}

impl ModelKind {
    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            1 => ModelKind::Dictionary,
            2 => ModelKind::CharLm,
            3 => ModelKind::Tagger,
            4 => ModelKind::Classifier,
            5 => ModelKind::StaticTable,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Dictionary => "dictionary",
            ModelKind::CharLm => "charlm",
            ModelKind::Tagger => "tagger",
            ModelKind::Classifier => "classifier",
            ModelKind::StaticTable => "static-table",
        }
    }
}

#[derive(Default)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn usize(&mut self, v: usize) {
        self.buf.extend_from_slice(&(v as u64).to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn strs<S: AsRef<str>>(&mut self, items: &[S]) {
        self.u32(items.len() as u32);
        for s in items {
            self.str(s.as_ref());
        }
    }

    pub fn raw_tensor(&mut self, shape: &[usize], data: &[f32]) {
        self.u32(shape.len() as u32);
        for &d in shape {
            self.u32(d as u32);
        }
        for &x in data {
            self.buf.extend_from_slice(&x.to_le_bytes());
        }
    }

    pub fn tensor(&mut self, t: &Tensor<f32>) {
        self.raw_tensor(t.shape(), t.data());
    }
}

pub struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Corruption(msg.into())
}

impl<'a> Decoder<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Decoder { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| bad("unexpected end of payload"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    pub fn usize(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| bad("integer out of range"))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    pub fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| bad("string is not UTF-8"))
    }

    pub fn strs(&mut self) -> Result<Vec<String>> {
        let n = self.u32()? as usize;
        (0..n).map(|_| self.str()).collect()
    }

    pub fn raw_tensor(&mut self) -> Result<(Vec<usize>, Vec<f32>)> {
        let rank = self.u32()? as usize;
        if rank > 8 {
            return Err(bad(format!("implausible tensor rank {rank}")));
        }
        let shape = (0..rank)
            .map(|_| self.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let len = shape
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .ok_or_else(|| bad("tensor too large"))?;
        let bytes = self.take(len.checked_mul(4).ok_or_else(|| bad("tensor too large"))?)?;
        let data = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        Ok((shape, data))
    }

    pub fn tensor(&mut self) -> Result<Tensor<f32>> {
        let (shape, data) = self.raw_tensor()?;
        Tensor::new(shape, data).map_err(|e| bad(format!("invalid tensor: {e}")))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(bad(format!(
                "{} unread payload bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// Types that can be written to and read from a model file.
pub trait Persist: Sized {
    const KIND: ModelKind;
    fn encode(&self, e: &mut Encoder);
    fn decode(d: &mut Decoder<'_>) -> Result<Self>;
}

/// Payload errors after a valid CRC mean the writer and reader disagree on
/// structure; report them as corruption too.
fn structural(e: Error) -> Error {
    match e {
        Error::Shape(m) | Error::Input(m) | Error::Data(m) => Error::Corruption(m),
        other => other,
    }
}

pub fn to_bytes<T: Persist>(model: &T) -> Vec<u8> {
    let mut e = Encoder::default();
    e.buf.extend_from_slice(&MAGIC);
    e.u32(FORMAT_VERSION);
    e.u8(T::KIND as u8);
    model.encode(&mut e);
    let crc = crc32fast::hash(&e.buf);
    e.u32(crc);
    e.buf
}

/// Checks framing and returns the kind tag and payload.
pub fn read_header(bytes: &[u8]) -> Result<(u8, &[u8])> {
    if bytes.len() < 4 {
        return Err(bad(format!("file is only {} bytes", bytes.len())));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(bad("truncated header"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    let actual = crc32fast::hash(body);
    if stored != actual {
        return Err(bad(format!(
            "checksum mismatch (stored {stored:08x}, computed {actual:08x})"
        )));
    }
    let version = u32::from_le_bytes(body[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    Ok((body[8], &body[HEADER_LEN..]))
}

pub fn from_bytes<T: Persist>(bytes: &[u8]) -> Result<T> {
    let (kind, payload) = read_header(bytes)?;
    if kind != T::KIND as u8 {
        let found = ModelKind::from_tag(kind)
            .map_or_else(|| format!("unknown tag {kind}"), |k| k.name().to_owned());
        return Err(Error::Kind {
            expected: T::KIND.name().into(),
            found,
        });
    }
    let mut d = Decoder::new(payload);
    let model = T::decode(&mut d).map_err(structural)?;
    d.finish()?;
    Ok(model)
}

/// Writes the file and syncs it to disk.
pub fn save<T: Persist>(model: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = to_bytes(model);
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    f.sync_all().map_err(|e| Error::io(path, e))
}

pub fn load<T: Persist>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}

/// Kind of the model stored at `path`, after framing checks.
pub fn peek_kind(path: impl AsRef<Path>) -> Result<ModelKind> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let (tag, _) = read_header(&bytes)?;
    ModelKind::from_tag(tag).ok_or_else(|| bad(format!("unknown kind tag {tag}")))
}

impl Persist for CharDictionary {
    const KIND: ModelKind = ModelKind::Dictionary;

    fn encode(&self, e: &mut Encoder) {
        e.str(&self.chars().iter().collect::<String>());
    }

    fn decode(d: &mut Decoder<'_>) -> Result<Self> {
        CharDictionary::from_chars(d.str()?.chars().collect())
    }
}

fn encode_linear(e: &mut Encoder, p: &LinearParams<f32>) {
    e.tensor(&p.weight);
    e.tensor(&p.bias);
}

fn decode_linear(d: &mut Decoder<'_>) -> Result<LinearParams<f32>> {
    LinearParams::from_parts(d.tensor()?, d.tensor()?)
}

fn encode_lstm(e: &mut Encoder, p: &LstmParams<f32>) {
    e.tensor(&p.w_ih);
    e.tensor(&p.w_hh);
    e.tensor(&p.bias);
}

fn decode_lstm(d: &mut Decoder<'_>) -> Result<LstmParams<f32>> {
    LstmParams::from_parts(d.tensor()?, d.tensor()?, d.tensor()?)
}

impl Persist for CharLm<f32> {
    const KIND: ModelKind = ModelKind::CharLm;

    fn encode(&self, e: &mut Encoder) {
        let c = &self.config;
        for v in [
            c.char_embed_dim,
            c.hidden,
            c.layers,
            c.seq_len,
            c.batch,
            c.patience,
            c.epochs,
            c.shard_lines,
        ] {
            e.usize(v);
        }
        for v in [c.lr0, c.anneal_factor, c.clip] {
            e.f64(v);
        }
        e.u8(match c.direction {
            Direction::Forward => 0,
            Direction::Backward => 1,
        });
        Persist::encode(&self.dict, e);
        e.tensor(&self.weights.embedding);
        e.u32(self.weights.layers.len() as u32);
        for l in &self.weights.layers {
            encode_lstm(e, l);
        }
        encode_linear(e, &self.weights.output);
    }

    fn decode(d: &mut Decoder<'_>) -> Result<Self> {
        let mut u = [0usize; 8];
        for v in &mut u {
            *v = d.usize()?;
        }
        let [char_embed_dim, hidden, layers, seq_len, batch, patience, epochs, shard_lines] = u;
        let (lr0, anneal_factor, clip) = (d.f64()?, d.f64()?, d.f64()?);
        let direction = match d.u8()? {
            0 => Direction::Forward,
            1 => Direction::Backward,
            t => return Err(bad(format!("unknown direction tag {t}"))),
        };
        let config = CharLmConfig {
            char_embed_dim,
            hidden,
            layers,
            seq_len,
            batch,
            lr0,
            anneal_factor,
            patience,
            epochs,
            direction,
            clip,
            shard_lines,
        };
        let dict = CharDictionary::decode(d)?;
        let embedding = d.tensor()?;
        let n = d.u32()? as usize;
        let layers = (0..n).map(|_| decode_lstm(d)).collect::<Result<Vec<_>>>()?;
        let output = decode_linear(d)?;
        CharLm::from_parts(
            config,
            dict,
            CharLmWeights {
                embedding,
                layers,
                output,
            },
        )
    }
}

impl Persist for StaticWordTable {
    const KIND: ModelKind = ModelKind::StaticTable;

    fn encode(&self, e: &mut Encoder) {
        e.u32(self.dim() as u32);
        e.strs(self.words());
        let flat: Vec<f32> = self
            .words()
            .iter()
            .flat_map(|w| self.get(w).expect("own word").iter().copied())
            .collect();
        e.raw_tensor(&[self.len(), self.dim()], &flat);
    }

    fn decode(d: &mut Decoder<'_>) -> Result<Self> {
        let dim = d.u32()? as usize;
        let words = d.strs()?;
        let (shape, data) = d.raw_tensor()?;
        if shape != [words.len(), dim] {
            return Err(bad(format!(
                "vector block {shape:?} does not match {} words of dim {dim}",
                words.len()
            )));
        }
        let mut t = StaticWordTable::new(dim)?;
        for (w, v) in words.iter().zip(data.chunks_exact(dim)) {
            if t.insert(w, v)? {
                return Err(bad(format!("duplicate word {w:?}")));
            }
        }
        Ok(t)
    }
}

fn encode_embedder(e: &mut Encoder, s: &StackedEmbedder) {
    e.u32(s.parts().len() as u32);
    for p in s.parts() {
        match p {
            EmbedderPart::Contextual(c) => {
                e.u8(1);
                c.forward_lm().encode(e);
                match c.backward_lm() {
                    Some(b) => {
                        e.u8(1);
                        b.encode(e);
                    }
                    None => e.u8(0),
                }
            }
            EmbedderPart::Static(t) => {
                e.u8(2);
                t.encode(e);
            }
        }
    }
}

fn decode_embedder(d: &mut Decoder<'_>) -> Result<StackedEmbedder> {
    let n = d.u32()? as usize;
    let mut parts = Vec::with_capacity(n.min(16));
    for _ in 0..n {
        parts.push(match d.u8()? {
            1 => {
                let fwd = CharLm::decode(d)?;
                let bwd = match d.u8()? {
                    0 => None,
                    1 => Some(CharLm::decode(d)?),
                    t => return Err(bad(format!("bad backward flag {t}"))),
                };
                EmbedderPart::Contextual(ContextualEmbedder::new(fwd, bwd)?)
            }
            2 => EmbedderPart::Static(StaticWordTable::decode(d)?),
            t => return Err(bad(format!("unknown embedder part {t}"))),
        });
    }
    StackedEmbedder::new(parts)
}

fn encode_fit(e: &mut Encoder, f: &FitConfig) {
    e.f64(f.lr);
    e.usize(f.epochs);
    e.usize(f.batch);
    e.f64(f.anneal_factor);
    e.usize(f.patience);
    e.f64(f.clip);
}

fn decode_fit(d: &mut Decoder<'_>) -> Result<FitConfig> {
    Ok(FitConfig {
        lr: d.f64()?,
        epochs: d.usize()?,
        batch: d.usize()?,
        anneal_factor: d.f64()?,
        patience: d.usize()?,
        clip: d.f64()?,
    })
}

impl Persist for CrfTagger {
    const KIND: ModelKind = ModelKind::Tagger;

    fn encode(&self, e: &mut Encoder) {
        encode_embedder(e, &self.embedder);
        e.strs(self.tags.names());
        e.usize(self.config.hidden);
        e.f64(self.config.word_dropout);
        encode_fit(e, &self.config.fit);
        let w = &self.weights;
        encode_lstm(e, &w.fwd);
        encode_lstm(e, &w.bwd);
        encode_linear(e, &w.proj);
        e.tensor(&w.transitions);
    }

    fn decode(d: &mut Decoder<'_>) -> Result<Self> {
        let embedder = decode_embedder(d)?;
        let tags = TagSet::new(LabelIndex::from_names(d.strs()?)?)?;
        let config = TaggerConfig {
            hidden: d.usize()?,
            word_dropout: d.f64()?,
            fit: decode_fit(d)?,
        };
        let weights = TaggerWeights {
            fwd: decode_lstm(d)?,
            bwd: decode_lstm(d)?,
            proj: decode_linear(d)?,
            transitions: d.tensor()?,
        };
        CrfTagger::from_parts(embedder, tags, config, weights)
    }
}

impl Persist for GruClassifier {
    const KIND: ModelKind = ModelKind::Classifier;

    fn encode(&self, e: &mut Encoder) {
        encode_embedder(e, &self.embedder);
        e.strs(self.labels.names());
        e.usize(self.config.hidden);
        encode_fit(e, &self.config.fit);
        let g = &self.weights.gru;
        for t in [&g.w_ih, &g.w_hh, &g.b_ih, &g.b_hh] {
            e.tensor(t);
        }
        encode_linear(e, &self.weights.out);
    }

    fn decode(d: &mut Decoder<'_>) -> Result<Self> {
        let embedder = decode_embedder(d)?;
        let labels = LabelIndex::from_names(d.strs()?)?;
        let config = ClassifierConfig {
            hidden: d.usize()?,
            fit: decode_fit(d)?,
        };
        let gru = GruParams::from_parts(d.tensor()?, d.tensor()?, d.tensor()?, d.tensor()?)?;
        let out = decode_linear(d)?;
        GruClassifier::from_parts(embedder, labels, config, ClassifierWeights { gru, out })
    }
}
