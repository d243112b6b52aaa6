//! Bit strings, the Elias-gamma integer code, prefix-free code sets with exact
//! Kraft sums, header/payload pairing and the alphabet bijection into bits.
//!
//! All serializations are most-significant-bit first. The text form of a
//! [`BitString`] is ASCII `'0'`/`'1'`; the binary form is a big-endian `u32`
//! bit length followed by the bits packed into bytes, zero padded.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite binary string.
///
/// The `Ord` implementation is length-lexicographic (shorter strings first,
/// then lexicographic with `0 < 1`). That is the default tie order on
/// responses and the order used to enumerate programs and advice.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// The `len` low-order bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "at most 64 bits fit in a u64");
        let bits = (0..len).rev().map(|i| (value >> i) & 1 == 1).collect();
        Self { bits }
    }

    /// `n` copies of `bit`.
    pub fn repeat(bit: bool, n: usize) -> Self {
        Self { bits: vec![bit; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString { bits: self.bits[start..end].to_vec() }
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        self.bits.starts_with(&prefix.bits)
    }

    pub fn ends_with(&self, suffix: &BitString) -> bool {
        self.bits.ends_with(&suffix.bits)
    }

    /// True iff `self` is a prefix of `other` and strictly shorter.
    pub fn is_proper_prefix_of(&self, other: &BitString) -> bool {
        self.len() < other.len() && other.starts_with(self)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> BitString {
        BitString { bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// Value of the string read as an unsigned binary numeral (MSB first).
    /// Only meaningful for strings of at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.len() <= 64);
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// Binary form: big-endian `u32` bit length, then the bits packed MSB first.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.len().div_ceil(8));
        out.extend_from_slice(&(self.len() as u32).to_be_bytes());
        out.extend(self.packed_bytes());
        out
    }

    /// The bits packed MSB first into bytes, with no length prefix.
    pub fn packed_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    pub fn from_packed(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::Parse("packed form shorter than its 4-byte length header".into()));
        }
        let len = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
        let body = &bytes[4..];
        if body.len() != len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "packed form declares {len} bits but carries {} bytes",
                body.len()
            )));
        }
        let bits: Vec<bool> = (0..len).map(|i| (body[i / 8] >> (7 - i % 8)) & 1 == 1).collect();
        // padding bits must be zero so the binary form is canonical
        if !len.is_multiple_of(8) {
            let last = body[body.len() - 1];
            if last & (0xffu8 >> (len % 8)) != 0 {
                return Err(Error::Parse("nonzero padding bits".into()));
            }
        }
        Ok(Self { bits })
    }

    /// Hex of the binary (length-prefixed) form; used for witnesses in golden files.
    pub fn to_hex(&self) -> String {
        self.to_packed().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str) -> Result<Self> {
        if !hex.len().is_multiple_of(2) {
            return Err(Error::Parse("odd-length hex".into()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_packed(&bytes)
    }

    /// All strings of exactly `len` bits in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64);
        (0..(1u64 << len)).map(move |v| BitString::from_u64(v, len))
    }

    /// All strings of length at most `max_len`, in length-lexicographic order.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_length)
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString::from_bits)
    }
}

impl From<&str> for BitString {
    /// Panics on characters other than `0`/`1`; meant for literals in tests
    /// and fixtures.
    fn from(s: &str) -> Self {
        s.parse().expect("bit string literal")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Elias-gamma code of `n >= 1`: `floor(log2 n)` zeros followed by the binary
/// form of `n`.
pub fn encode_nat(n: u64) -> Result<BitString> {
    if n == 0 {
        return Err(Error::invalid("Elias gamma is undefined for 0"));
    }
    let width = 64 - n.leading_zeros() as usize;
    let mut bits = vec![false; width - 1];
    bits.extend(BitString::from_u64(n, width).bits);
    Ok(BitString::from_bits(bits))
}

/// Length in bits of the gamma code of `n >= 1`.
pub fn gamma_len(n: u64) -> usize {
    assert!(n >= 1);
    2 * (63 - n.leading_zeros() as usize) + 1
}

/// Decode one gamma codeword from the front of `bits`.
///
/// Returns the value and the number of bits consumed, or `None` when the
/// input ends before the codeword does (or the value would overflow a u64).
pub fn decode_nat(bits: &[bool]) -> Option<(u64, usize)> {
    let zeros = bits.iter().take_while(|&&b| !b).count();
    if zeros >= 64 || bits.len() < 2 * zeros + 1 {
        return None;
    }
    let value = bits[zeros..=2 * zeros]
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | b as u64);
    Some((value, 2 * zeros + 1))
}

/// A finite set of bit strings whose prefix-freeness and Kraft sum can be
/// checked exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixCodeSet {
    members: Vec<BitString>,
}

impl PrefixCodeSet {
    /// Duplicates are collapsed; members are kept in length-lex order.
    pub fn new(members: impl IntoIterator<Item = BitString>) -> Self {
        let mut members: Vec<BitString> = members.into_iter().collect();
        members.sort();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    /// Exact `sum 2^-|w|` over the members.
    pub fn kraft_sum(&self) -> BigRational {
        self.members.iter().fold(BigRational::zero(), |acc, w| {
            acc + BigRational::new(BigInt::one(), BigInt::one() << w.len())
        })
    }

    /// `(is_prefix_free, kraft_sum)`.
    pub fn check(&self) -> (bool, BigRational) {
        (self.is_prefix_free(), self.kraft_sum())
    }

    pub fn is_prefix_free(&self) -> bool {
        // In lexicographic (not length-lex) order a proper prefix sorts
        // immediately before some string it prefixes, so adjacent pairs suffice.
        let mut lex: Vec<&BitString> = self.members.iter().collect();
        lex.sort_by(|a, b| a.bits().cmp(b.bits()));
        lex.windows(2).all(|w| !w[0].is_proper_prefix_of(w[1]))
    }
}

/// Free-function form of [`PrefixCodeSet::check`].
pub fn check_prefix_free(set: &PrefixCodeSet) -> (bool, BigRational) {
    set.check()
}

/// Overhead of `pair_header_payload` beyond `|header| + |payload|`: pairing is
/// plain concatenation, which is uniquely decodable because the header table
/// is prefix-free.
pub const PAIR_OVERHEAD_BITS: usize = 0;

/// A registered, prefix-free table of executor headers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeaderTable {
    headers: Vec<BitString>,
}

impl HeaderTable {
    pub fn new(headers: Vec<BitString>) -> Result<Self> {
        let set = PrefixCodeSet::new(headers.iter().cloned());
        if set.members().len() != headers.len() {
            return Err(Error::invalid("duplicate header"));
        }
        if !set.is_prefix_free() {
            return Err(Error::invalid("header table is not prefix-free"));
        }
        Ok(Self { headers })
    }

    pub fn headers(&self) -> &[BitString] {
        &self.headers
    }

    pub fn contains(&self, header: &BitString) -> bool {
        self.headers.contains(header)
    }

    /// Pair a registered header with a payload.
    pub fn pair(&self, header: &BitString, payload: &BitString) -> Result<BitString> {
        if !self.contains(header) {
            return Err(Error::InvalidHeader(header.to_string()));
        }
        Ok(header.concat(payload))
    }

    /// Split `w` into its registered header and the remaining payload.
    pub fn unpair(&self, w: &BitString) -> Option<(BitString, BitString)> {
        // prefix-freeness makes the match unique
        self.headers
            .iter()
            .find(|h| w.starts_with(h))
            .map(|h| (h.clone(), w.slice(h.len(), w.len())))
    }
}

/// Free-function form of [`HeaderTable::pair`].
pub fn pair_header_payload(table: &HeaderTable, header: &BitString, payload: &BitString) -> Result<BitString> {
    table.pair(header, payload)
}

/// Computable bijection between strings over finite alphabets and bit strings.
///
/// A string over a `k`-symbol alphabet is mapped to its 1-based position in
/// the length-lexicographic enumeration of that alphabet's strings, and the
/// position is mapped back to a bit string through the binary length-lex
/// enumeration. For `k = 2` this is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetCodec {
    pub sigma_arity: u32,
    pub gamma_arity: u32,
}

impl AlphabetCodec {
    pub fn new(sigma_arity: u32, gamma_arity: u32) -> Result<Self> {
        if sigma_arity < 2 || gamma_arity < 2 {
            return Err(Error::invalid("alphabets need at least two symbols"));
        }
        Ok(Self { sigma_arity, gamma_arity })
    }

    pub fn binary() -> Self {
        Self { sigma_arity: 2, gamma_arity: 2 }
    }

    pub fn encode_instance(&self, symbols: &[u32]) -> Result<BitString> {
        encode_bijective(symbols, self.sigma_arity)
    }

    pub fn decode_instance(&self, bits: &BitString) -> Vec<u32> {
        decode_bijective(bits, self.sigma_arity)
    }

    pub fn encode_response(&self, symbols: &[u32]) -> Result<BitString> {
        encode_bijective(symbols, self.gamma_arity)
    }

    pub fn decode_response(&self, bits: &BitString) -> Vec<u32> {
        decode_bijective(bits, self.gamma_arity)
    }
}

/// Bijective base-`k` value of a string (digits `0..k` read as `1..=k`); the
/// empty string maps to 0, so the value is the length-lex position minus one.
fn bijective_value(symbols: &[u32], k: u32) -> Result<BigUint> {
    symbols.iter().try_fold(BigUint::zero(), |n, &s| {
        if s >= k {
            return Err(Error::invalid(format!("symbol {s} outside a {k}-symbol alphabet")));
        }
        Ok(n * k + (s + 1))
    })
}

fn bijective_digits(mut n: BigUint, k: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while !n.is_zero() {
        let digit: u32 = ((&n - 1u32) % k).try_into().expect("digit below k");
        out.push(digit);
        n = (n - 1u32 - digit) / k;
    }
    out.reverse();
    out
}

fn encode_bijective(symbols: &[u32], k: u32) -> Result<BitString> {
    let n = bijective_value(symbols, k)?;
    Ok(BitString::from_bits(bijective_digits(n, 2).into_iter().map(|d| d == 1).collect()))
}

fn decode_bijective(bits: &BitString, k: u32) -> Vec<u32> {
    let digits: Vec<u32> = bits.bits().iter().map(|&b| b as u32).collect();
    let n = bijective_value(&digits, 2).expect("binary digits are in range");
    bijective_digits(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::from(s)
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(encode_nat(1).unwrap(), bs("1"));
        assert_eq!(encode_nat(2).unwrap(), bs("010"));
        assert_eq!(encode_nat(3).unwrap(), bs("011"));
        assert_eq!(encode_nat(4).unwrap(), bs("00100"));
        assert!(matches!(encode_nat(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn gamma_round_trip_and_prefix_free_to_2_16() {
        let mut codes = Vec::new();
        for n in 1..=(1u64 << 16) {
            let c = encode_nat(n).unwrap();
            assert_eq!(c.len(), gamma_len(n));
            assert_eq!(decode_nat(c.bits()), Some((n, c.len())));
            codes.push(c);
        }
        assert!(PrefixCodeSet::new(codes).is_prefix_free());
    }

    #[test]
    fn decode_nat_truncated() {
        assert_eq!(decode_nat(bs("0").bits()), None);
        assert_eq!(decode_nat(bs("001").bits()), None);
        assert_eq!(decode_nat(&[]), None);
    }

    #[test]
    fn prefix_free_examples() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(PrefixCodeSet::new([bs("0"), bs("10"), bs("11")]).check(), (true, r(1, 1)));
        assert_eq!(PrefixCodeSet::new([bs("0"), bs("01")]).check(), (false, r(3, 4)));
        assert_eq!(PrefixCodeSet::new([]).check(), (true, r(0, 1)));
        // the empty string prefixes everything
        assert!(!PrefixCodeSet::new([bs(""), bs("1")]).is_prefix_free());
        // lexicographic neighbours are not enough when a longer string sits between
        assert!(!PrefixCodeSet::new([bs("0"), bs("00"), bs("011")]).is_prefix_free());
    }

    #[test]
    fn pairing_examples() {
        let table = HeaderTable::new(vec![bs("1"), bs("010"), bs("011")]).unwrap();
        let w = table.pair(&bs("1"), &bs("0101")).unwrap();
        assert_eq!(w, bs("10101"));
        assert_eq!(w.len(), 1 + 4 + PAIR_OVERHEAD_BITS);
        assert_eq!(table.pair(&bs("010"), &bs("")).unwrap(), bs("010"));
        assert_eq!(table.pair(&bs("00"), &bs("1")), Err(Error::InvalidHeader("00".into())));
        assert!(HeaderTable::new(vec![bs("1"), bs("10")]).is_err());
    }

    #[test]
    fn pair_unpair_sweep() {
        let table = HeaderTable::new(vec![bs("1"), bs("010"), bs("011"), bs("00100")]).unwrap();
        let mut cases = 0;
        for h in table.headers().to_vec() {
            for payload in BitString::all_up_to(11) {
                let w = table.pair(&h, &payload).unwrap();
                assert_eq!(table.unpair(&w), Some((h.clone(), payload)));
                cases += 1;
            }
        }
        assert!(cases >= 10_000);
    }

    #[test]
    fn packed_form() {
        let s = bs("10110");
        assert_eq!(s.to_packed(), vec![0, 0, 0, 5, 0b1011_0000]);
        assert_eq!(BitString::from_packed(&s.to_packed()).unwrap(), s);
        assert_eq!(s.to_hex(), "00000005b0");
        assert_eq!(BitString::from_hex("00000005b0").unwrap(), s);
        assert!(BitString::from_packed(&[0, 0, 0, 5, 0b1011_0001]).is_err());
        assert!(BitString::from_packed(&[0, 0, 0, 9, 0]).is_err());
        assert_eq!(BitString::new().to_packed(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn length_lex_order() {
        let mut v = vec![bs("1"), bs("00"), bs(""), bs("0"), bs("01")];
        v.sort();
        assert_eq!(v, vec![bs(""), bs("0"), bs("1"), bs("00"), bs("01")]);
    }

    #[test]
    fn codec_binary_is_identity() {
        let c = AlphabetCodec::binary();
        for s in BitString::all_up_to(8) {
            let syms: Vec<u32> = s.bits().iter().map(|&b| b as u32).collect();
            assert_eq!(c.encode_instance(&syms).unwrap(), s);
        }
    }

    #[test]
    fn codec_ternary_bijection() {
        let c = AlphabetCodec::new(3, 5).unwrap();
        // encode ∘ decode on bit strings and decode ∘ encode on symbol strings
        for s in BitString::all_up_to(10) {
            let syms = c.decode_instance(&s);
            assert!(syms.iter().all(|&d| d < 3));
            assert_eq!(c.encode_instance(&syms).unwrap(), s);
            let resp = c.decode_response(&s);
            assert_eq!(c.encode_response(&resp).unwrap(), s);
        }
        assert_eq!(c.encode_instance(&[]).unwrap(), bs(""));
        assert_eq!(c.encode_instance(&[0]).unwrap(), bs("0"));
        assert_eq!(c.encode_instance(&[2]).unwrap(), bs("00"));
        assert!(c.encode_instance(&[3]).is_err());
    }
}
