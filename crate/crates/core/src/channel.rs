//! Per-stage power gain matrices.

use crate::config::GameConfig;
use crate::topology::{path_loss_gain, CellTopology};

/// Linear power gains `|g_ji|²`, indexed `[tx j][rx i]`; the diagonal is each
/// pair's own link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    rows: Vec<Vec<f64>>,
}

impl ChannelGains {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == rows.len()));
        ChannelGains { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, tx: usize, rx: usize) -> f64 {
        self.rows[tx][rx]
    }

    pub fn own(&self, i: usize) -> f64 {
        self.rows[i][i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// `G[j][i] = (A_PL · A_SSF[j][i] · (d0/d_ji)^(α/2))²`.
///
/// `fading` is row-major `[tx][rx]` amplitudes as produced by
/// [`crate::fading::FadingState::advance`].
pub fn gain_matrix(topology: &CellTopology, fading: &[f64], config: &GameConfig) -> ChannelGains {
    let m = topology.len();
    assert_eq!(fading.len(), m * m, "fading sample count must be M²");
    let rows = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| {
                    let amp = path_loss_gain(topology.distances[j][i], config)
                        .expect("topology distances are floored above zero")
                        * fading[j * m + i];
                    amp * amp
                })
                .collect()
        })
        .collect();
    ChannelGains { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{stream_rng, BehaviorClass, Stream};
    use crate::fading::FadingState;
    use crate::topology::{generate_topology, D2dPair, Point};

    #[test]
    fn unit_fading_is_pure_path_loss() {
        let c = GameConfig::default();
        let t = generate_topology(&c, &mut stream_rng(4, 0, Stream::Topology)).unwrap();
        let g = gain_matrix(&t, &vec![1.0; 24 * 24], &c);
        let apl2 = c.path_loss_attenuation().powi(2);
        for j in 0..24 {
            for i in 0..24 {
                let expect = apl2 * (20.0 / t.distances[j][i]).powi(4);
                assert!((g.get(j, i) - expect).abs() <= 1e-12 * expect);
            }
        }
    }

    #[test]
    fn symmetric_layout_gives_symmetric_gains() {
        let pairs = vec![
            D2dPair { tx: Point::new(-100.0, 0.0), rx: Point::new(-80.0, 0.0), class: BehaviorClass::Casual },
            D2dPair { tx: Point::new(100.0, 0.0), rx: Point::new(80.0, 0.0), class: BehaviorClass::Casual },
        ];
        let t = CellTopology::from_pairs(Point::ORIGIN, pairs, 1.0);
        let g = gain_matrix(&t, &[1.0; 4], &GameConfig::default());
        assert_eq!(g.get(0, 1), g.get(1, 0));
        assert_eq!(g.own(0), g.own(1));
    }

    #[test]
    fn entries_match_scalar_recomputation() {
        let c = GameConfig::default();
        let t = generate_topology(&c, &mut stream_rng(8, 0, Stream::Topology)).unwrap();
        let mut f = FadingState::new(24, 16, 0.01, &mut stream_rng(8, 0, Stream::Fading));
        let amps = f.advance();
        let g = gain_matrix(&t, &amps, &c);
        for j in 0..24 {
            for i in 0..24 {
                let d = t.pairs[j].tx.distance(t.pairs[i].rx).max(1.0);
                let oracle = (10f64.powf(-3.22) * amps[j * 24 + i] * (20.0 / d).powf(2.0)).powi(2);
                assert!(g.get(j, i) > 0.0 && g.get(j, i).is_finite());
                assert!((g.get(j, i) - oracle).abs() <= 1e-12 * oracle);
            }
        }
    }

    #[test]
    fn mean_gain_over_fading_is_path_loss() {
        // Average G[j][i] over many independent fading draws for a fixed layout.
        let c = GameConfig::default();
        let t = generate_topology(&c, &mut stream_rng(10, 0, Stream::Topology)).unwrap();
        let draws = 4000;
        let mut acc = vec![0.0; 24 * 24];
        for r in 0..draws {
            let mut f = FadingState::new(24, 16, 0.01, &mut stream_rng(10, r, Stream::Fading));
            let g = gain_matrix(&t, &f.advance(), &c);
            for j in 0..24 {
                for i in 0..24 {
                    acc[j * 24 + i] += g.get(j, i);
                }
            }
        }
        let apl2 = c.path_loss_attenuation().powi(2);
        let mut worst: f64 = 0.0;
        for j in 0..24 {
            for i in 0..24 {
                let expect = apl2 * (20.0 / t.distances[j][i]).powi(4);
                worst = worst.max((acc[j * 24 + i] / draws as f64 / expect - 1.0).abs());
            }
        }
        // 576 links, per-link standard error ≈ 1/√4000 ≈ 0.016.
        assert!(worst < 0.08, "{worst}");
    }
}
