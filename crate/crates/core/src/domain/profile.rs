use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scenario::{Scenario, ServerId};
use crate::scalar::Scalar;

/// Global server-to-federation assignment. `assignment[i]` is the 1-based federation
/// index of the scenario's i-th server in ascending-id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyProfile {
    federations: usize,
    assignment: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A scenario server has no federation.
    Missing(ServerId),
    /// A server was assigned more than once.
    Duplicate(ServerId),
    /// The assignment names a server the scenario does not have.
    Unknown(ServerId),
    /// A positional entry past the end of the scenario's server list.
    Extra(usize),
    OutOfRange {
        server: ServerId,
        index: usize,
        federations: usize,
    },
    FederationCount {
        profile: usize,
        scenario: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Missing(s) => write!(f, "server {s} is not assigned to any federation"),
            Violation::Duplicate(s) => write!(f, "server {s} is assigned more than once"),
            Violation::Unknown(s) => write!(f, "server {s} does not exist"),
            Violation::Extra(pos) => write!(f, "extra assignment at position {pos}"),
            Violation::OutOfRange {
                server,
                index,
                federations,
            } => write!(f, "server {server} assigned to federation {index} outside 1..={federations}"),
            Violation::FederationCount { profile, scenario } => {
                write!(f, "profile has m={profile} but scenario has m={scenario}")
            }
        }
    }
}

impl StrategyProfile {
    /// Builds a profile without checking it against a scenario.
    pub fn new(federations: usize, assignment: Vec<usize>) -> Self {
        Self {
            federations,
            assignment,
        }
    }

    /// Every server in federation `federation`.
    pub fn uniform(server_count: usize, federations: usize, federation: usize) -> Self {
        Self::new(federations, vec![federation; server_count])
    }

    /// Builds a profile from explicit (server id, federation) pairs, reporting every
    /// missing, duplicate, unknown or out-of-range entry.
    pub fn from_pairs<T: Scalar>(
        scenario: &Scenario<T>,
        pairs: &[(ServerId, usize)],
    ) -> Result<Self, Vec<Violation>> {
        let m = scenario.federations();
        let mut slots: Vec<Option<usize>> = vec![None; scenario.server_count()];
        let mut violations = Vec::new();
        for &(sid, fed) in pairs {
            match scenario.server_position(sid) {
                None => violations.push(Violation::Unknown(sid)),
                Some(pos) => {
                    if slots[pos].is_some() {
                        violations.push(Violation::Duplicate(sid));
                        continue;
                    }
                    if fed == 0 || fed > m {
                        violations.push(Violation::OutOfRange {
                            server: sid,
                            index: fed,
                            federations: m,
                        });
                    }
                    slots[pos] = Some(fed);
                }
            }
        }
        for (pos, slot) in slots.iter().enumerate() {
            if slot.is_none() {
                violations.push(Violation::Missing(scenario.servers()[pos].id));
            }
        }
        if violations.is_empty() {
            Ok(Self::new(m, slots.into_iter().map(|s| s.unwrap_or(0)).collect()))
        } else {
            Err(violations)
        }
    }

    pub fn federations(&self) -> usize {
        self.federations
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Federation of the server at canonical position `pos`.
    pub fn federation_at(&self, pos: usize) -> usize {
        self.assignment[pos]
    }

    pub fn set(&mut self, pos: usize, federation: usize) {
        self.assignment[pos] = federation;
    }

    /// Copy with one server moved.
    pub fn with_move(&self, pos: usize, federation: usize) -> Self {
        let mut next = self.clone();
        next.assignment[pos] = federation;
        next
    }

    /// Canonical positions of the servers in each federation; index 0 is federation 1.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.federations];
        for (pos, &f) in self.assignment.iter().enumerate() {
            if (1..=self.federations).contains(&f) {
                out[f - 1].push(pos);
            }
        }
        out
    }

    /// Map view keyed by server id.
    pub fn to_map<T: Scalar>(&self, scenario: &Scenario<T>) -> BTreeMap<ServerId, usize> {
        scenario
            .servers()
            .iter()
            .zip(&self.assignment)
            .map(|(s, &f)| (s.id, f))
            .collect()
    }
}

/// Checks that the profile is a total function from the scenario's servers to `1..=m`.
pub fn validate_profile<T: Scalar>(
    profile: &StrategyProfile,
    scenario: &Scenario<T>,
) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if profile.federations != scenario.federations() {
        violations.push(Violation::FederationCount {
            profile: profile.federations,
            scenario: scenario.federations(),
        });
    }
    let m = profile.federations;
    for (pos, server) in scenario.servers().iter().enumerate() {
        match profile.assignment.get(pos) {
            None => violations.push(Violation::Missing(server.id)),
            Some(&f) if f == 0 || f > m => violations.push(Violation::OutOfRange {
                server: server.id,
                index: f,
                federations: m,
            }),
            Some(_) => {}
        }
    }
    for pos in scenario.server_count()..profile.assignment.len() {
        violations.push(Violation::Extra(pos));
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{EconomicModel, Location, Provider, Server};

    fn six_servers(m: usize) -> Scenario<f64> {
        let servers = (1..=6)
            .map(|id| Server {
                id,
                provider_id: 0,
                location: Location::new(0.0, 0.0),
                capacity: 1,
            })
            .collect();
        Scenario::new(
            servers,
            vec![Provider { id: 0, server_ids: (1..=6).collect() }],
            vec![],
            vec![],
            m,
            EconomicModel { oc_unit: 0.0, tc_unit: 0.0, sigma_floor: 0.0, rt_sla: 1.0, tp_sla: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn interleaved_profile_is_valid() {
        let s = six_servers(3);
        let p = StrategyProfile::new(3, vec![1, 2, 3, 1, 2, 3]);
        assert!(validate_profile(&p, &s).is_ok());
        let members = p.members();
        let ids: Vec<Vec<usize>> = members
            .iter()
            .map(|fed| fed.iter().map(|&pos| s.servers()[pos].id).collect())
            .collect();
        assert_eq!(ids, vec![vec![1, 4], vec![2, 5], vec![3, 6]]);
    }

    #[test]
    fn empty_assignment_leaves_server_uncovered() {
        let servers = vec![Server { id: 1, provider_id: 0, location: Location::new(0.0, 0.0), capacity: 1 }];
        let s: Scenario<f64> = Scenario::new(
            servers,
            vec![Provider { id: 0, server_ids: vec![1] }],
            vec![],
            vec![],
            1,
            EconomicModel { oc_unit: 0.0, tc_unit: 0.0, sigma_floor: 0.0, rt_sla: 1.0, tp_sla: 1.0 },
        )
        .unwrap();
        let err = validate_profile(&StrategyProfile::new(1, vec![]), &s).unwrap_err();
        assert_eq!(err, vec![Violation::Missing(1)]);
        let err = StrategyProfile::from_pairs(&s, &[]).unwrap_err();
        assert_eq!(err, vec![Violation::Missing(1)]);
    }

    #[test]
    fn index_past_m_is_out_of_range() {
        let s = six_servers(3);
        let p = StrategyProfile::new(3, vec![1, 2, 3, 4, 2, 3]);
        let err = validate_profile(&p, &s).unwrap_err();
        assert_eq!(err, vec![Violation::OutOfRange { server: 4, index: 4, federations: 3 }]);
    }

    #[test]
    fn pairs_report_every_problem() {
        let s = six_servers(2);
        let err = StrategyProfile::from_pairs(&s, &[(1, 1), (1, 2), (2, 3), (9, 1), (3, 1), (4, 1), (5, 1)])
            .unwrap_err();
        assert!(err.contains(&Violation::Duplicate(1)));
        assert!(err.contains(&Violation::OutOfRange { server: 2, index: 3, federations: 2 }));
        assert!(err.contains(&Violation::Unknown(9)));
        assert!(err.contains(&Violation::Missing(6)));
        let ok = StrategyProfile::from_pairs(&s, &[(6, 2), (5, 1), (4, 2), (3, 1), (2, 2), (1, 1)]).unwrap();
        assert_eq!(ok.assignment(), &[1, 2, 1, 2, 1, 2]);
        assert_eq!(ok.to_map(&s)[&6], 2);
    }
}
