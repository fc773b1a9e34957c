//! Location names, ordered location lists, and the membership/subset witness
//! algebra.
//!
//! A [`Member`] proves that a location appears in a list and doubles as the
//! identifier of that location. A [`Subset`] does the same for a list of
//! locations. Both are validated when they are built, so any value of these
//! types is a sound proof. The list a witness is relative to is its
//! *context*; primitives check that contexts line up with the census or with
//! the owners of the value being touched.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The runtime name of a party.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocationId(String);

impl LocationId {
    /// Builds a name, rejecting the empty string.
    pub fn new(name: impl Into<String>) -> Result<Self, WitnessError> {
        let name = name.into();
        if name.is_empty() {
            return Err(WitnessError::EmptyName);
        }
        Ok(LocationId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for LocationId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for LocationId {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for LocationId {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Witness construction failures. Each of these is a programming error in
/// the choreography that tried to build the witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("location names must be nonempty")]
    EmptyName,
    #[error("location {0} is listed twice")]
    Duplicate(LocationId),
    #[error("location {name} is not a member of {context:?}")]
    NotMember { name: LocationId, context: LocationList },
    #[error("{subject:?} is not a subset of {context:?}")]
    NotSubset { subject: LocationList, context: LocationList },
    #[error("witness contexts differ: {left:?} vs {right:?}")]
    ContextMismatch { left: LocationList, right: LocationList },
    #[error("no entry at position {index} of {context:?}")]
    TooShort { index: usize, context: LocationList },
}

/// An ordered list of distinct locations. Order is the iteration order of
/// every fan-out, fan-in, and parallel block over the list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocationList(Arc<[LocationId]>);

impl LocationList {
    pub fn new<I>(names: I) -> Result<Self, WitnessError>
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        let mut entries: Vec<LocationId> = Vec::new();
        for name in names {
            let id = LocationId::new(name)?;
            if entries.contains(&id) {
                return Err(WitnessError::Duplicate(id));
            }
            entries.push(id);
        }
        Ok(LocationList(entries.into()))
    }

    pub fn from_ids(ids: Vec<LocationId>) -> Result<Self, WitnessError> {
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(WitnessError::Duplicate(id.clone()));
            }
        }
        Ok(LocationList(ids.into()))
    }

    pub fn empty() -> Self {
        LocationList(Arc::from([]))
    }

    pub fn as_slice(&self) -> &[LocationId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, LocationId> {
        self.0.iter()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|l| l.as_str() == name)
    }

    pub fn get(&self, index: usize) -> Option<&LocationId> {
        self.0.get(index)
    }

    /// True if every entry of `self` appears in `other`.
    pub fn is_subset_of(&self, other: &LocationList) -> bool {
        self.0.iter().all(|l| other.contains(l.as_str()))
    }
}

impl fmt::Debug for LocationList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a LocationList {
    type Item = &'a LocationId;
    type IntoIter = core::slice::Iter<'a, LocationId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Proof that `subject()` is an element of `context()`, carrying the
/// position of the subject.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Member {
    context: LocationList,
    index: usize,
}

impl Member {
    pub fn subject(&self) -> &LocationId {
        &self.context.0[self.index]
    }

    pub fn context(&self) -> &LocationList {
        &self.context
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// The one-element subset `[self]` of the same context.
    pub fn alone(&self) -> Subset {
        Subset {
            subject: LocationList(Arc::from([self.subject().clone()])),
            context: self.context.clone(),
        }
    }
}

impl fmt::Debug for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Member({:?} ∈ {:?} @{})", self.subject(), self.context, self.index)
    }
}

/// Proof that every entry of `subject()` appears in `context()`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    subject: LocationList,
    context: LocationList,
}

impl Subset {
    pub fn subject(&self) -> &LocationList {
        &self.subject
    }

    pub fn context(&self) -> &LocationList {
        &self.context
    }

    /// The `index`-th member of the subject list, as a witness over the
    /// subject list.
    pub fn member(&self, index: usize) -> Option<Member> {
        (index < self.subject.len()).then(|| Member {
            context: self.subject.clone(),
            index,
        })
    }

    /// Iterates the subject's entries as members of the subject list.
    pub fn members(&self) -> impl Iterator<Item = Member> + '_ {
        (0..self.subject.len()).map(move |index| Member {
            context: self.subject.clone(),
            index,
        })
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset({:?} ⊆ {:?})", self.subject, self.context)
    }
}

/// `[x] ⊆ [x]`, with `x` at position 0.
pub fn singleton(x: &LocationId) -> Member {
    Member {
        context: LocationList(Arc::from([x.clone()])),
        index: 0,
    }
}

/// The empty list, as a subset of `context`.
pub fn nobody(context: &LocationList) -> Subset {
    Subset {
        subject: LocationList::empty(),
        context: context.clone(),
    }
}

/// Prepends the member to the subset; both must share a context.
pub fn cons(m: &Member, s: &Subset) -> Result<Subset, WitnessError> {
    if m.context != s.context {
        return Err(WitnessError::ContextMismatch {
            left: m.context.clone(),
            right: s.context.clone(),
        });
    }
    let mut ids = Vec::with_capacity(s.subject.len() + 1);
    ids.push(m.subject().clone());
    ids.extend(s.subject.iter().cloned());
    Ok(Subset {
        subject: LocationList::from_ids(ids)?,
        context: s.context.clone(),
    })
}

/// `cons` with the arguments flipped.
pub fn cons_sub(s: &Subset, m: &Member) -> Result<Subset, WitnessError> {
    cons(m, s)
}

/// Builds a subset from members listed in order. All members must share a
/// context; `context` is used when the list is empty.
pub fn members_of(context: &LocationList, ms: &[&Member]) -> Result<Subset, WitnessError> {
    ms.iter()
        .rev()
        .try_fold(nobody(context), |acc, m| cons(m, &acc))
}

/// Moves a membership from `xs` into a larger list `ys` through `xs ⊆ ys`.
pub fn in_super(s: &Subset, m: &Member) -> Result<Member, WitnessError> {
    if m.context != s.subject {
        return Err(WitnessError::ContextMismatch {
            left: m.context.clone(),
            right: s.subject.clone(),
        });
    }
    let index = s
        .context
        .position(m.subject().as_str())
        .expect("subset witness is sound");
    Ok(Member {
        context: s.context.clone(),
        index,
    })
}

/// `xs ⊆ xs`.
pub fn refl(xs: &LocationList) -> Subset {
    Subset {
        subject: xs.clone(),
        context: xs.clone(),
    }
}

/// The full census as a subset of itself.
pub fn all_of(census: &LocationList) -> Subset {
    refl(census)
}

/// Composes `a ⊆ b` and `b ⊆ c` into `a ⊆ c`.
pub fn transitive(ab: &Subset, bc: &Subset) -> Result<Subset, WitnessError> {
    if ab.context != bc.subject {
        return Err(WitnessError::ContextMismatch {
            left: ab.context.clone(),
            right: bc.subject.clone(),
        });
    }
    Ok(Subset {
        subject: ab.subject.clone(),
        context: bc.context.clone(),
    })
}

/// The tail of `context` as a subset of `context`, i.e. `xs ⊆ (x : xs)`.
pub fn cons_set(context: &LocationList) -> Result<Subset, WitnessError> {
    if context.is_empty() {
        return Err(WitnessError::TooShort {
            index: 0,
            context: context.clone(),
        });
    }
    Ok(Subset {
        subject: LocationList(context.0[1..].into()),
        context: context.clone(),
    })
}

/// Extends the context of `xs ⊆ ys` to `xs ⊆ (y : ys)`.
pub fn cons_super(s: &Subset, y: &LocationId) -> Result<Subset, WitnessError> {
    let mut ids = Vec::with_capacity(s.context.len() + 1);
    ids.push(y.clone());
    ids.extend(s.context.iter().cloned());
    Ok(Subset {
        subject: s.subject.clone(),
        context: LocationList::from_ids(ids)?,
    })
}

/// Checks a concrete membership.
pub fn explicit_member(name: &str, context: &LocationList) -> Result<Member, WitnessError> {
    match context.position(name) {
        Some(index) => Ok(Member {
            context: context.clone(),
            index,
        }),
        None => Err(WitnessError::NotMember {
            name: LocationId::new(name.to_owned())?,
            context: context.clone(),
        }),
    }
}

/// Checks a concrete containment.
pub fn explicit_subset(subject: &LocationList, context: &LocationList) -> Result<Subset, WitnessError> {
    if !subject.is_subset_of(context) {
        return Err(WitnessError::NotSubset {
            subject: subject.clone(),
            context: context.clone(),
        });
    }
    Ok(Subset {
        subject: subject.clone(),
        context: context.clone(),
    })
}

fn listed(index: usize, context: &LocationList) -> Result<Member, WitnessError> {
    if index >= context.len() {
        return Err(WitnessError::TooShort {
            index,
            context: context.clone(),
        });
    }
    Ok(Member {
        context: context.clone(),
        index,
    })
}

pub fn listed_first(context: &LocationList) -> Result<Member, WitnessError> {
    listed(0, context)
}

pub fn listed_second(context: &LocationList) -> Result<Member, WitnessError> {
    listed(1, context)
}

pub fn listed_third(context: &LocationList) -> Result<Member, WitnessError> {
    listed(2, context)
}

pub fn listed_fourth(context: &LocationList) -> Result<Member, WitnessError> {
    listed(3, context)
}

pub fn listed_fifth(context: &LocationList) -> Result<Member, WitnessError> {
    listed(4, context)
}

pub fn listed_sixth(context: &LocationList) -> Result<Member, WitnessError> {
    listed(5, context)
}

pub fn to_loc_tm(m: &Member) -> &LocationId {
    m.subject()
}

pub fn to_locs(s: &Subset) -> &[LocationId] {
    s.subject.as_slice()
}
