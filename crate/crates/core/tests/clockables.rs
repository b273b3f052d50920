use ittm::clockables::*;
use ittm::engine::{measure, Budget};
use ittm::ordinal::Ordinal;
use ittm::program::MachineShape;
use ittm::tape::TapeWord;

fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn clock(s: &str) -> ittm::program::Program {
    clock_program(&ClockSpec::three_tape(ord(s))).unwrap()
}

fn stage(p: &ittm::program::Program) -> Ordinal {
    measure(p, &TapeWord::zeros(), Budget::default()).unwrap()
}

#[test]
fn clock_programs_halt_on_target() {
    for t in ["0", "5", "w", "w+4", "w*2", "w*2+3", "w^2", "w^2+w", "w^2*2+w*3+1"] {
        let p = clock(t);
        assert_eq!(verify_clock(&p, &ord(t), Budget::default()).unwrap(), ClockVerdict::Ok, "{t}");
    }
}

#[test]
fn verify_reports_mismatch() {
    let v = verify_clock(&clock("w+1"), &ord("w"), Budget::default()).unwrap();
    assert_eq!(v, ClockVerdict::Mismatch { measured: ord("w+1") });
}

#[test]
fn successor_and_double_head() {
    for t in ["w", "w*2", "w^2", "w^2+w*2"] {
        let p = clock(t);
        let s = onetape_clock_successor(&p, Budget::default()).unwrap();
        let d = doublehead_clock(&p, Budget::default()).unwrap();
        assert_eq!(s.shape(), MachineShape::ONE_TAPE);
        assert_eq!(d.shape(), MachineShape::DOUBLE_HEAD);
        assert_eq!(stage(&s), ord(t).succ().unwrap(), "{t}");
        assert_eq!(stage(&d), ord(t), "{t}");
    }
}

#[test]
fn successor_needs_limit() {
    let e = onetape_clock_successor(&clock("w+2"), Budget::default()).unwrap_err();
    assert!(matches!(e, ClockError::NotLimit(_)));
}

#[test]
fn limit_clock_with_timer() {
    for (a, b) in [("w*2", "w"), ("w*3", "w"), ("w^2", "w*3")] {
        let q = onetape_clock_limit(&clock(a), &clock(b), Budget::default()).unwrap();
        assert_eq!(q.shape(), MachineShape::ONE_TAPE);
        assert_eq!(stage(&q), ord(a), "{a} after {b}");
    }
}

#[test]
fn limit_clock_rejects_late_timer() {
    let e = onetape_clock_limit(&clock("w*2"), &clock("w*2"), Budget::default()).unwrap_err();
    assert!(matches!(e, ClockError::Stage { .. }));
}
