use shockcost::dto::{ModelSpec, SolutionDto};
use shockcost::format::to_json;
use shockcost::svg::{emit_svg, segments, SvgStyle};
use shockcost_core::constructions::{split_evolution, two_shock_absorber};
use shockcost_core::tracker::evolve;
use shockcost_core::{FluxModel, PiecewiseConstantProfile, Policy, SpaceTimeSolution};

fn spec(name: &str) -> ModelSpec {
    ModelSpec {
        builtin: Some(name.to_string()),
        ..ModelSpec::default()
    }
}

fn samples() -> Vec<(ModelSpec, SpaceTimeSolution)> {
    let wave = PiecewiseConstantProfile::new(vec![0.0, 0.5], vec![0.2, -0.2]).unwrap();
    let bumpy =
        PiecewiseConstantProfile::new(vec![0.05, 0.3, 0.55, 0.9], vec![0.6, 0.1, 0.45, 0.3]).unwrap();
    let cubic = FluxModel::cubic();
    let burgers = FluxModel::burgers();
    vec![
        (spec("cubic"), split_evolution(&cubic, 0.0, &wave, 1.0, 8).unwrap().solution),
        (spec("cubic"), two_shock_absorber(&cubic, 0.0, 0.4, 0.2, 0.5).unwrap().solution),
        (spec("burgers"), evolve(&burgers, &bumpy, 0.7, &Policy::SingleShock).unwrap()),
        (spec("burgers"), evolve(&burgers, &bumpy, 0.7, &Policy::Entropic { mesh: 0.03 }).unwrap()),
    ]
}

#[test]
fn solutions_survive_a_json_round_trip() {
    for (spec, sol) in samples() {
        let dto = SolutionDto::new(&spec, &sol);
        let text = to_json(&dto).unwrap();
        let back: SolutionDto = serde_json::from_str(&text).unwrap();
        assert_eq!(back, dto);
        let rebuilt = back.build().unwrap();
        assert_eq!(rebuilt.slabs(), sol.slabs());
        assert_eq!(rebuilt.initial_profile(), sol.initial_profile());
    }
}

#[test]
fn inconsistent_slab_times_are_rejected() {
    let (spec, sol) = samples().remove(2);
    let mut dto = SolutionDto::new(&spec, &sol);
    dto.slabs[0].t_end += 0.25;
    assert!(dto.build().is_err());
}

type Line = (f64, f64, f64, f64, String);

fn lines(svg: &str) -> Vec<Line> {
    let attr = |l: &str, name: &str| -> String {
        let key = format!(" {name}=\"");
        let start = l.find(&key).unwrap() + key.len();
        l[start..].split('"').next().unwrap().to_string()
    };
    svg.lines()
        .filter(|l| l.starts_with("<line") && !l.contains("stroke-width"))
        .map(|l| {
            let f = |n: &str| attr(l, n).parse::<f64>().unwrap();
            (f("x1"), f("y1"), f("x2"), f("y2"), attr(l, "stroke"))
        })
        .collect()
}

fn flip(color: &str) -> &str {
    match color {
        "#1f5fbf" => "#c8202a",
        "#c8202a" => "#1f5fbf",
        other => other,
    }
}

/// Endpoint pairs ordered by height, x compared modulo the plot width.
fn same_segment(a: &Line, b: &Line, period: f64) -> bool {
    let close_x = |u: f64, v: f64| {
        let d = (u - v).abs() % period;
        d.min(period - d) <= 2e-3
    };
    let norm = |l: &Line| {
        if l.1 <= l.3 {
            (l.0, l.1, l.2, l.3)
        } else {
            (l.2, l.3, l.0, l.1)
        }
    };
    let (p, q) = (norm(a), norm(b));
    close_x(p.0, q.0) && (p.1 - q.1).abs() <= 2e-3 && close_x(p.2, q.2) && (p.3 - q.3).abs() <= 2e-3 && a.4 == b.4
}

#[test]
fn reversed_diagram_is_the_mirror_image() {
    let style = SvgStyle::default();
    let period = style.width - 2.0 * style.margin;
    for (_, sol) in samples() {
        let fwd = lines(&emit_svg(&sol, &style));
        let rev = lines(&emit_svg(&sol.reversed(), &style));
        assert_eq!(fwd.len(), rev.len());
        let mut unmatched: Vec<Line> = rev.clone();
        for l in &fwd {
            let m = (style.width - l.0, style.height - l.1, style.width - l.2, style.height - l.3, flip(&l.4).to_string());
            let k = unmatched
                .iter()
                .position(|r| same_segment(r, &m, period))
                .unwrap_or_else(|| panic!("no mirror for {l:?}"));
            unmatched.swap_remove(k);
        }
    }
}

#[test]
fn segments_stay_in_the_period() {
    for (_, sol) in samples() {
        let segs = segments(&sol);
        assert!(!segs.is_empty());
        for s in segs {
            for x in [s.x0, s.x1] {
                assert!((-1e-12..=1.0 + 1e-12).contains(&x));
            }
            assert!(s.t1 >= s.t0);
        }
    }
}

#[test]
fn absorber_diagram_shows_three_fronts_until_tau() {
    let a = two_shock_absorber(&FluxModel::cubic(), 0.0, 0.4, 0.2, 0.5).unwrap();
    let t = a.tau;
    assert!((t - 25.0 / 3.0).abs() < 1e-12);
    let segs = segments(&a.solution);
    assert!(segs.iter().all(|s| s.t1 <= t + 1e-12));
    let live_at = |time: f64| segs.iter().filter(|s| s.t0 <= time && time < s.t1).count();
    assert_eq!(live_at(0.25 * t), 3);
    assert_eq!(live_at(t), 0);
    assert!(segs.iter().any(|s| (s.t1 - t).abs() < 1e-9));
}

