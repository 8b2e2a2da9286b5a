//! Temporary tuning probe (not part of the suite).

use skim_core::bench::{random_word, run_experiment, ModelParams, ScenarioConfig};

fn config(seed_idx: u64, n_steps: usize, attention_period: usize) -> ScenarioConfig {
    ScenarioConfig {
        n_event_channels: 5,
        word_a: random_word(5, 100, 10, 2000 + 2 * seed_idx).unwrap(),
        word_b: random_word(5, 100, 10, 2001 + 2 * seed_idx).unwrap(),
        word_rate: 5.0,
        attention_period,
        noise_rate: 0.01,
        n_steps,
        target_widen: 10,
        seed: 100 + seed_idx,
    }
}

#[test]
#[ignore]
fn probe_a3_grid() {
    for &n_steps in &[20_000usize, 50_000] {
        for &period in &[2500usize, 5000] {
            for &eps in &[2.5e-4f64, 1e-2, 1e-1, 1.0] {
                let mut fas = vec![];
                let mut ha = vec![];
                let mut hb = vec![];
                let mut ratio = vec![];
                let mut secs = vec![];
                for seed_idx in 0..3u64 {
                    let c = config(seed_idx, n_steps, period);
                    let p = ModelParams {
                        n_hidden: 250,
                        eps: Some(eps),
                        seed: 7 + seed_idx,
                        ..ModelParams::default()
                    };
                    let t0 = std::time::Instant::now();
                    let run = run_experiment(&c, &p).unwrap();
                    secs.push(t0.elapsed().as_secs_f64());
                    let h = &run.report.hits;
                    fas.push(h.false_alarm_rate_per_1000);
                    ha.push(h.hit_rate_word_a.unwrap_or(f64::NAN));
                    hb.push(h.hit_rate_word_b.unwrap_or(f64::NAN));
                    ratio.push(run.report.score.min_correct_to_max_incorrect);
                }
                println!(
                    "steps={n_steps} period={period} eps={eps:.1e} | fa={fas:.2?} ha={ha:.2?} hb={hb:.2?} ratio={ratio:.1?} secs={secs:.1?}"
                );
            }
        }
    }
}
