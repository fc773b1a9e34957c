//! 1-out-of-2 oblivious transfer from public-key encryption.
//!
//! The receiver makes one genuine key pair and one fake public key with no
//! secret key behind it, ordered by its select bit. The sender encrypts
//! `b1` under the first key and `b2` under the second; the receiver can
//! decrypt only the one it chose. Secure against passive adversaries only.

use rand::{Rng, RngCore};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::cli::Cli;
use crate::choreo::{Choreo, ChoreoResult};
use crate::located::Located;
use crate::locations::{listed_first, listed_second, singleton};

/// A bit-encryption scheme that can also sample public keys nobody holds a
/// secret key for.
pub trait PkeScheme {
    type PublicKey: Serialize + DeserializeOwned + Clone;
    type SecretKey: Clone;
    type Ciphertext: Serialize + DeserializeOwned + Clone;

    fn generate(&self, rng: &mut dyn RngCore) -> (Self::PublicKey, Self::SecretKey);

    fn fake_public_key(&self, rng: &mut dyn RngCore) -> Self::PublicKey;

    fn encrypt(&self, pk: &Self::PublicKey, bit: bool, rng: &mut dyn RngCore) -> Self::Ciphertext;

    fn decrypt(&self, sk: &Self::SecretKey, c: &Self::Ciphertext) -> bool;
}

/// Textbook RSA over a modulus of at most 64 bits.
///
/// A bit `b` is encrypted as `(2r + b)^e mod n` for random `r`, so
/// decryption reads the parity of the recovered plaintext.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyRsa {
    /// Size of each of the two primes; the modulus has twice as many bits.
    pub prime_bits: u32,
}

impl Default for ToyRsa {
    fn default() -> Self {
        ToyRsa { prime_bits: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsaPublicKey {
    pub n: u64,
    pub e: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsaSecretKey {
    pub n: u64,
    pub d: u64,
}

const E: u64 = 65537;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; these bases are exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (i128::from(m), i128::from(a));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(i128::from(m)) as u64)
}

impl ToyRsa {
    fn random_odd(&self, bits: u32, rng: &mut dyn RngCore) -> u64 {
        let top = 1u64 << (bits - 1);
        (rng.random_range(0..top) | top) | 1
    }

    fn random_prime(&self, rng: &mut dyn RngCore) -> u64 {
        loop {
            let c = self.random_odd(self.prime_bits, rng);
            if is_prime(c) {
                return c;
            }
        }
    }
}

impl PkeScheme for ToyRsa {
    type PublicKey = RsaPublicKey;
    type SecretKey = RsaSecretKey;
    type Ciphertext = u64;

    fn generate(&self, rng: &mut dyn RngCore) -> (RsaPublicKey, RsaSecretKey) {
        assert!((4..=32).contains(&self.prime_bits), "prime size out of range");
        loop {
            let p = self.random_prime(rng);
            let q = self.random_prime(rng);
            if p == q {
                continue;
            }
            let phi = (p - 1) * (q - 1);
            if let Some(d) = mod_inverse(E % phi, phi) {
                let n = p * q;
                return (RsaPublicKey { n, e: E }, RsaSecretKey { n, d });
            }
        }
    }

    fn fake_public_key(&self, rng: &mut dyn RngCore) -> RsaPublicKey {
        RsaPublicKey {
            n: self.random_odd(2 * self.prime_bits, rng),
            e: E,
        }
    }

    fn encrypt(&self, pk: &RsaPublicKey, bit: bool, rng: &mut dyn RngCore) -> u64 {
        let r = rng.random_range(0..pk.n / 2);
        pow_mod(2 * r + u64::from(bit), pk.e, pk.n)
    }

    fn decrypt(&self, sk: &RsaSecretKey, c: &u64) -> bool {
        pow_mod(*c, sk.d, sk.n) & 1 == 1
    }
}

/// Two public keys and the secret key for whichever one is genuine.
pub type KeyTriple<S> = (<S as PkeScheme>::PublicKey, <S as PkeScheme>::PublicKey, <S as PkeScheme>::SecretKey);

/// The genuine key goes first when `s` is true.
pub fn gen_keys<S: PkeScheme>(scheme: &S, s: bool, rng: &mut dyn RngCore) -> KeyTriple<S> {
    let (pk, sk) = scheme.generate(rng);
    let fake = scheme.fake_public_key(rng);
    if s {
        (pk, fake, sk)
    } else {
        (fake, pk, sk)
    }
}

pub fn encrypt_s<S: PkeScheme>(
    scheme: &S,
    pks: &(S::PublicKey, S::PublicKey),
    b1: bool,
    b2: bool,
    rng: &mut dyn RngCore,
) -> (S::Ciphertext, S::Ciphertext) {
    (scheme.encrypt(&pks.0, b1, rng), scheme.encrypt(&pks.1, b2, rng))
}

pub fn decrypt_s<S: PkeScheme>(scheme: &S, keys: &KeyTriple<S>, s: bool, cs: &(S::Ciphertext, S::Ciphertext)) -> bool {
    if s {
        scheme.decrypt(&keys.2, &cs.0)
    } else {
        scheme.decrypt(&keys.2, &cs.1)
    }
}

/// Oblivious transfer over the census `[sender, receiver]`. The receiver
/// learns `b1` when its select bit is true and `b2` otherwise.
pub fn ot2<L: Cli, S: PkeScheme>(
    ch: &mut Choreo<'_, L>,
    scheme: &S,
    bb: &Located<(bool, bool)>,
    s: &Located<bool>,
) -> ChoreoResult<Located<bool>> {
    let sender = listed_first(ch.census())?;
    let receiver = listed_second(ch.census())?;
    let me_r = singleton(receiver.subject());
    let me_s = singleton(sender.subject());

    let keys = ch.locally(&receiver, |un, io| Ok(gen_keys(scheme, *un.get(&me_r, s), io.rng())))?;
    let pks = ch.locally_then_send(
        &receiver,
        |un, _| {
            let (pk1, pk2, _) = un.get(&me_r, &keys);
            Ok((pk1.clone(), pk2.clone()))
        },
        &sender.alone(),
    )?;
    let encrypted = ch.locally_then_send(
        &sender,
        |un, io| {
            let (b1, b2) = *un.get(&me_s, bb);
            Ok(encrypt_s(scheme, un.get(&me_s, &pks), b1, b2, io.rng()))
        },
        &receiver.alone(),
    )?;
    ch.locally(&receiver, |un, _| {
        Ok(decrypt_s(scheme, un.get(&me_r, &keys), *un.get(&me_r, s), un.get(&me_r, &encrypted)))
    })
}
