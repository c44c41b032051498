//! Classification over every unweighted support, with and without `(0,0)`.

use kernelwalk::classify::{classify, trivial_closed_form, Nature};
use kernelwalk::group::GroupVerdict;
use kernelwalk::kernel::{degeneracy_test, genus_classify, HalfPlaneClass};
use kernelwalk::model::{nonzero_steps, Step, StepSet, WeightedModel};
use kernelwalk::series::count_walks;
use kernelwalk::Rational;
use num_traits::Zero;

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn all_supports() -> Vec<StepSet> {
    let mut out = Vec::new();
    for mask in 0u16..256 {
        let set = StepSet::from_steps(
            nonzero_steps()
                .enumerate()
                .filter(|(n, _)| mask & (1 << n) != 0)
                .map(|(_, s)| s),
        );
        for with_origin in [false, true] {
            let mut set = set;
            if with_origin {
                set.insert(Step::new(0, 0));
            }
            if !set.is_empty() {
                out.push(set);
            }
        }
    }
    out
}

#[test]
fn every_support_classifies_consistently() {
    let mut counts = std::collections::BTreeMap::new();
    for set in all_supports() {
        let m = WeightedModel::uniform(set, half()).unwrap();
        let r = classify(&m).unwrap_or_else(|e| panic!("support {set}: {e}"));
        *counts.entry(format!("{:?}", r.verdict)).or_insert(0usize) += 1;
        let degenerate = degeneracy_test(&m).degenerate;
        let class = genus_classify(set).class;
        let expected = if degenerate {
            Some(Nature::Algebraic)
        } else {
            match class {
                HalfPlaneClass::Genus0Family1 => Some(Nature::DifferentiallyTranscendental),
                HalfPlaneClass::Elliptic => None,
                _ => Some(Nature::Algebraic),
            }
        };
        match expected {
            Some(v) => assert_eq!(r.verdict, v, "support {set}"),
            None => {
                let g = r.group().expect("elliptic models carry a group report");
                match g.verdict {
                    GroupVerdict::Finite { .. } => assert_eq!(r.verdict, Nature::DifferentiallyAlgebraic),
                    GroupVerdict::InfinitePresumed { .. } => assert_eq!(r.verdict, Nature::EquivalentUndecided),
                }
            }
        }
        if r.verdict == Nature::EquivalentUndecided {
            assert!(matches!(
                r.group().unwrap().verdict,
                GroupVerdict::InfinitePresumed { .. }
            ));
        }
        assert_eq!(
            r.differentially_algebraic == Some(true),
            matches!(r.verdict, Nature::Algebraic | Nature::DifferentiallyAlgebraic)
        );
    }
    eprintln!("{counts:?}");
}

#[test]
fn closed_forms_match_the_series() {
    for set in all_supports() {
        let m = WeightedModel::uniform(set, half()).unwrap();
        let Some(cf) = trivial_closed_form(&m) else { continue };
        let table = count_walks(&m, 10);
        for k in 0..=10 {
            assert_eq!(table.get(0, 0, k), cf.origin_coefficient(k), "support {set}");
            assert!(
                table.layer_mass(k) == cf.origin_coefficient(k)
                    || cf.d00.is_zero() && k > 0 && table.layer_mass(k).is_zero()
            );
        }
    }
}

/// The classical census of unweighted models without `(0,0)`, counted up
/// to the symmetry `x <-> y` and excluding models whose walks cannot leave
/// the origin or that reduce to a half-plane problem (genus-zero families
/// 2-4, all algebraic): 79 nondegenerate, of which 5 have genus zero, 23 a finite
/// group and 51 an infinite group.
#[test]
fn unweighted_census() {
    let mut census = [0usize; 4];
    for set in all_supports().into_iter().filter(|s| !s.contains(Step::new(0, 0))) {
        let mirror = set.map(Step::transpose);
        if mirror.mask() < set.mask() {
            continue;
        }
        let m = WeightedModel::uniform(set, half()).unwrap();
        if degeneracy_test(&m).degenerate || trivial_closed_form(&m).is_some() {
            continue;
        }
        let slot = match classify(&m).unwrap().verdict {
            Nature::Algebraic => continue,
            Nature::DifferentiallyTranscendental => 0,
            Nature::DifferentiallyAlgebraic => 1,
            Nature::EquivalentUndecided => 2,
        };
        census[slot] += 1;
        census[3] += 1;
    }
    assert_eq!(census, [5, 23, 51, 79]);
}
