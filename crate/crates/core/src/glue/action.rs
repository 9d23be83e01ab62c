//! Group actions on glued surfaces, glued generator by generator.

use super::manifold::{BoundaryGluing, GluedManifold, TaggedPoint};
use super::map::{glue_maps, smooth_glue, GluedMap};
use crate::error::{Error, Result};
use crate::heisenberg::{build_action, element_map, ActionSpec, ActionTarget, Gen, HeisElem, Word};
use crate::stretch::ChiProfile;

/// A Heisenberg action on each piece of `host`, glued (and smoothed when a
/// profile is given).
#[derive(Clone, Debug)]
pub struct GluedAction {
    pub host: GluedManifold,
    pub actions: Vec<ActionSpec>,
    pub profile: Option<ChiProfile>,
    generators: Vec<GluedMap>,
}

impl GluedAction {
    pub fn new(
        host: GluedManifold,
        targets: Vec<ActionTarget>,
        profile: Option<ChiProfile>,
        bits: usize,
    ) -> Result<Self> {
        if targets.len() != host.pieces.len() {
            return Err(Error::Parameter(format!("{} actions for {} pieces", targets.len(), host.pieces.len())));
        }
        for (t, m) in targets.iter().zip(&host.pieces) {
            if t.model().kind != m.kind {
                return Err(Error::Parameter(format!("{} action does not act on a {}", t.name(), m.name())));
            }
        }
        let actions = targets.into_iter().map(|t| build_action(t, bits)).collect::<Result<Vec<_>>>()?;
        let mut out = GluedAction { host, actions, profile, generators: Vec::new() };
        out.generators = Gen::ALL.iter().map(|g| out.element(&g.elem(), bits)).collect::<Result<_>>()?;
        Ok(out)
    }

    /// The disk and the annulus, both blown up from the projective action on
    /// the sphere, glued along their circles over `(-1, 0, 0)`.
    pub fn disk_annulus(profile: Option<ChiProfile>, bits: usize) -> Result<Self> {
        let host = GluedManifold::glue(
            ActionTarget::DiskBlowup.model(),
            ActionTarget::AnnulusBlowup.model(),
            &BoundaryGluing::identity(&[("minus", "minus")]),
            bits,
        )?;
        Self::new(host, vec![ActionTarget::DiskBlowup, ActionTarget::AnnulusBlowup], profile, bits)
    }

    pub fn is_smoothed(&self) -> bool {
        self.profile.is_some()
    }

    pub fn generator(&self, g: Gen) -> &GluedMap {
        let i = Gen::ALL.iter().position(|x| *x == g).expect("every generator is listed");
        &self.generators[i]
    }

    /// The glued map of a group element, built from its own element maps.
    pub fn element(&self, g: &HeisElem, bits: usize) -> Result<GluedMap> {
        let maps = self.actions.iter().map(|a| element_map(&a.target, g, bits)).collect::<Result<Vec<_>>>()?;
        match &self.profile {
            Some(p) => smooth_glue(&maps, &self.host, p, bits),
            None => glue_maps(&maps, &self.host, bits),
        }
    }

    /// Applies the glued generators letter by letter, rightmost first.
    pub fn evaluate_word(&self, w: &Word, p: &TaggedPoint, bits: usize) -> Result<TaggedPoint> {
        let mut q = p.clone();
        for &g in w.0.iter().rev() {
            q = self.generator(g).evaluate(&q, bits)?;
        }
        Ok(q)
    }

    /// Largest distance between the element map of `w` and the composed
    /// generators over `points`.
    pub fn homomorphism_defect(&self, w: &Word, points: &[TaggedPoint], bits: usize) -> Result<f64> {
        let direct = self.element(&w.eval(), bits)?;
        let mut worst = 0.0f64;
        for p in points {
            let a = direct.evaluate(p, bits)?;
            let b = self.evaluate_word(w, p, bits)?;
            worst = worst.max(self.host.distance(&a, &b, bits)?);
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glue::check_compatibility;

    const B: usize = 192;

    #[test]
    fn blown_up_actions_agree_on_the_shared_circle() {
        let act = GluedAction::disk_annulus(None, B).unwrap();
        for g in Gen::ALL {
            let rep = check_compatibility(&act.generator(g).maps, &act.host, 32, B).unwrap();
            assert!(rep.pass, "{g:?}: {}", rep.max_defect);
        }
    }

    #[test]
    fn smoothed_words_match_composed_generators() {
        let act = GluedAction::disk_annulus(Some(ChiProfile::default()), B).unwrap();
        let pts = act.host.sample_points(12, 3, B);
        for w in ["XYxy", "X^2 Y^-1 X", "yyX"] {
            let d = act.homomorphism_defect(&w.parse().unwrap(), &pts, B).unwrap();
            assert!(d < 1e-30, "{w}: {d:e}");
        }
    }
}
