//! Located and faceted values.
//!
//! A [`Located`] value is one value known identically to every owner. A
//! [`Faceted`] value holds one possibly-different facet per owner. Under the
//! centralized interpreter every payload is present. Under projection a
//! party only holds payloads it owns; everything else is an absent marker,
//! and reading an absent marker panics because it can only come from a bug
//! in the library.

use alloc::vec::Vec;

use crate::locations::{LocationId, LocationList, Member, Subset, WitnessError};

const ABSENT: &str = "read of an absent payload: the reader is not an owner at this endpoint";

/// One value shared by every owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located<T> {
    owners: LocationList,
    value: Option<T>,
}

impl<T> Located<T> {
    /// A value present at this endpoint for all of `owners`.
    pub fn new(owners: LocationList, value: T) -> Self {
        Located {
            owners,
            value: Some(value),
        }
    }

    /// The marker a non-owner holds in place of the payload.
    pub fn absent(owners: LocationList) -> Self {
        Located { owners, value: None }
    }

    pub(crate) fn from_option(owners: LocationList, value: Option<T>) -> Self {
        Located { owners, value }
    }

    pub fn owners(&self) -> &LocationList {
        &self.owners
    }

    pub fn is_present(&self) -> bool {
        self.value.is_some()
    }

    /// What `who` would see: the payload if `who` owns it and it is present
    /// here. Used by harnesses to compare endpoint views.
    pub fn value_at(&self, who: &str) -> Option<&T> {
        if self.owners.contains(who) {
            self.value.as_ref()
        } else {
            None
        }
    }

    pub(crate) fn into_option(self) -> Option<T> {
        self.value
    }

    pub(crate) fn payload(&self) -> &T {
        self.value.as_ref().expect(ABSENT)
    }
}

/// One facet per owner; facets need not agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Faceted<T> {
    owners: LocationList,
    facets: Vec<Option<T>>,
}

impl<T> Faceted<T> {
    /// Builds a faceted value with every facet present. `facets` follows
    /// the order of `owners`.
    pub fn new(owners: LocationList, facets: Vec<T>) -> Result<Self, WitnessError> {
        if facets.len() != owners.len() {
            return Err(WitnessError::TooShort {
                index: facets.len(),
                context: owners,
            });
        }
        Ok(Faceted {
            owners,
            facets: facets.into_iter().map(Some).collect(),
        })
    }

    pub(crate) fn from_options(owners: LocationList, facets: Vec<Option<T>>) -> Self {
        debug_assert_eq!(owners.len(), facets.len());
        Faceted { owners, facets }
    }

    pub fn owners(&self) -> &LocationList {
        &self.owners
    }

    /// The facet belonging to `who`, if it is present at this endpoint.
    pub fn facet_at(&self, who: &str) -> Option<&T> {
        self.owners
            .position(who)
            .and_then(|i| self.facets[i].as_ref())
    }

    /// Present facets paired with their owners, in owner order.
    pub fn present(&self) -> impl Iterator<Item = (&LocationId, &T)> {
        self.owners
            .iter()
            .zip(self.facets.iter())
            .filter_map(|(l, f)| f.as_ref().map(|f| (l, f)))
    }
}

/// Common view of [`Located`] and [`Faceted`]: who owns it, and what a given
/// owner holds.
pub trait Wrapped<T> {
    fn owners(&self) -> &LocationList;

    /// The payload `who` holds, if `who` is an owner and it is present.
    fn facet(&self, who: &LocationId) -> Option<&T>;

    fn facet_mut(&mut self, who: &LocationId) -> Option<&mut T>;

    fn into_facet(self, who: &LocationId) -> Option<T>
    where
        Self: Sized;
}

impl<T> Wrapped<T> for Located<T> {
    fn owners(&self) -> &LocationList {
        &self.owners
    }

    fn facet(&self, who: &LocationId) -> Option<&T> {
        self.value_at(who.as_str())
    }

    fn facet_mut(&mut self, who: &LocationId) -> Option<&mut T> {
        if self.owners.contains(who.as_str()) {
            self.value.as_mut()
        } else {
            None
        }
    }

    fn into_facet(self, who: &LocationId) -> Option<T> {
        if self.owners.contains(who.as_str()) {
            self.value
        } else {
            None
        }
    }
}

impl<T> Wrapped<T> for Faceted<T> {
    fn owners(&self) -> &LocationList {
        &self.owners
    }

    fn facet(&self, who: &LocationId) -> Option<&T> {
        self.facet_at(who.as_str())
    }

    fn facet_mut(&mut self, who: &LocationId) -> Option<&mut T> {
        let i = self.owners.position(who.as_str())?;
        self.facets[i].as_mut()
    }

    fn into_facet(self, who: &LocationId) -> Option<T> {
        let i = self.owners.position(who.as_str())?;
        self.facets.into_iter().nth(i).flatten()
    }
}

fn check_member(m: &Member, owners: &LocationList, party: &LocationId) {
    assert!(
        m.subject() == party,
        "unwrap capability of {party} used with a witness for {}",
        m.subject()
    );
    assert!(
        m.context() == owners,
        "membership witness over {:?} used on a value owned by {owners:?}",
        m.context()
    );
}

/// The capability handed to a party's local computation to read values it
/// owns, facets included.
#[derive(Debug, Clone)]
pub struct Unwrap {
    party: LocationId,
}

impl Unwrap {
    pub(crate) fn new(party: LocationId) -> Self {
        Unwrap { party }
    }

    /// The party running the computation.
    pub fn party(&self) -> &LocationId {
        &self.party
    }

    /// Reads the payload `m` proves this party owns.
    ///
    /// # Panics
    ///
    /// If `m` names another party, if `m`'s context is not `w`'s owner list,
    /// or if the payload is absent.
    pub fn get<'w, T, W>(&self, m: &Member, w: &'w W) -> &'w T
    where
        W: Wrapped<T> + ?Sized,
    {
        check_member(m, w.owners(), &self.party);
        w.facet(&self.party).expect(ABSENT)
    }

    /// Mutable access to this party's payload, for per-party state carried
    /// across steps.
    pub fn get_mut<'w, T, W>(&self, m: &Member, w: &'w mut W) -> &'w mut T
    where
        W: Wrapped<T> + ?Sized,
    {
        check_member(m, w.owners(), &self.party);
        w.facet_mut(&self.party).expect(ABSENT)
    }
}

/// The capability handed to a congruent computation. It reads only
/// [`Located`] values whose owners include every performer.
#[derive(Debug, Clone)]
pub struct Unwraps {
    parties: LocationList,
}

impl Unwraps {
    pub(crate) fn new(parties: LocationList) -> Self {
        Unwraps { parties }
    }

    pub fn parties(&self) -> &LocationList {
        &self.parties
    }

    /// # Panics
    ///
    /// If `s` is not a witness of the performers being a subset of `v`'s
    /// owners, or if the payload is absent.
    pub fn get<'v, T>(&self, s: &Subset, v: &'v Located<T>) -> &'v T {
        assert!(
            s.subject() == &self.parties,
            "subset witness for {:?} used by performers {:?}",
            s.subject(),
            self.parties
        );
        assert!(
            s.context() == v.owners(),
            "subset witness over {:?} used on a value owned by {:?}",
            s.context(),
            v.owners()
        );
        v.payload()
    }
}

/// Removes one layer of nesting, keeping the parties listed in both layers.
pub fn flatten<T>(
    outer_proof: &Subset,
    inner_proof: &Subset,
    v: Located<Located<T>>,
) -> Result<Located<T>, WitnessError> {
    if outer_proof.subject() != inner_proof.subject() {
        return Err(WitnessError::ContextMismatch {
            left: outer_proof.subject().clone(),
            right: inner_proof.subject().clone(),
        });
    }
    if outer_proof.context() != v.owners() {
        return Err(WitnessError::ContextMismatch {
            left: outer_proof.context().clone(),
            right: v.owners().clone(),
        });
    }
    let owners = outer_proof.subject().clone();
    match v.value {
        Some(inner) => {
            if inner_proof.context() != inner.owners() {
                return Err(WitnessError::ContextMismatch {
                    left: inner_proof.context().clone(),
                    right: inner.owners().clone(),
                });
            }
            Ok(Located::from_option(owners, inner.value))
        }
        None => Ok(Located::absent(owners)),
    }
}

/// Repackages one owner's facet as a singly-located value.
pub fn localize<T: Clone>(m: &Member, f: &Faceted<T>) -> Result<Located<T>, WitnessError> {
    if m.context() != f.owners() {
        return Err(WitnessError::ContextMismatch {
            left: m.context().clone(),
            right: f.owners().clone(),
        });
    }
    let owners = LocationList::from_ids(alloc::vec![m.subject().clone()])?;
    Ok(Located::from_option(owners, f.facets[m.index()].clone()))
}

/// Views a shared value as a faceted one whose facets all agree.
pub fn fracture<T: Clone>(v: &Located<T>) -> Faceted<T> {
    let facets = v.owners.iter().map(|_| v.value.clone()).collect();
    Faceted::from_options(v.owners.clone(), facets)
}
