use proptest::prelude::*;
use spinlab::dsl::{
    parse, parse_program, print_program, sequence_to_program, BinOp, Expr, FrameDecl, Program, PulseAxis, PulseTarget,
    Statement,
};
use spinlab::sequence::{
    cnot_sequence, grover_inversion_sequence, grover_iteration_sequence, grover_oracle_sequence, grover_preparation,
    labeled_epr_preparation, labeling_sequence, superposition_sequence, PulseSequence, Simulator, ZVariant,
};
use spinlab::spin::SpinSystem;

fn sys() -> SpinSystem {
    SpinSystem::bromotrifluoroethylene()
}

const HANDWRITTEN: &[&str] = &[
    "",
    "# comment only\n",
    "pulse A x180\n",
    "pulse B,C y90\ndelay 1/(2*J[B,C])\npulse B,C y-90\n",
    "system data/bromotrifluoroethylene.cfg\nframe uncouple A\npulse B,C x90\n",
    "frame resonant\npulse A -y90\ndelay 0.0053808\npulse B x180\ndelay 0.0012858\npulse B x180\npulse A y90\n",
    "pulse B:x90,C:x-90\n",
    "pulse A:y90,B:x45,C:y-30\n",
    "delay 1/(2*J[A,B]) + 1/(2*J[A,C])\n",
    "delay (1/J[A,B] - 1/J[A,C]) * -0.25\n",
    "delay 1e-3*3\n",
    "delay -(-0.001)\n",
    "frame offsets B=61.05,C=-37.5\npulse B y90\nacquire B 4 0.001\n",
    "acquire A,B,C 2 1/1000\n",
    "pulse C x360 # full turn\n",
    "  pulse   B,C   y90   \n",
    "frame uncouple B\ndelay 0.01\nframe resonant\ndelay 0.01\n",
    "delay 1/(4*J[B,C])/2\n",
    "delay 1-(2-3)\n",
    "delay 6-2-3\n",
];

fn sequence_corpus() -> Vec<PulseSequence> {
    let sys = sys();
    let mut seqs = vec![
        labeling_sequence(&sys).unwrap(),
        labeled_epr_preparation(&sys).unwrap(),
        grover_preparation(&sys).unwrap(),
        superposition_sequence(&sys).unwrap(),
        grover_inversion_sequence(&sys).unwrap(),
        cnot_sequence(&sys, 1, 2).unwrap(),
    ];
    for x0 in 0..4 {
        for v in ZVariant::ALL {
            seqs.push(grover_iteration_sequence(&sys, x0, v).unwrap());
        }
        seqs.push(grover_oracle_sequence(&sys, x0, ZVariant::default()).unwrap());
    }
    seqs
}

fn assert_fixed_point(text: &str) {
    let first = parse(text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let printed = print_program(&first);
    let second = parse(&printed).unwrap();
    assert_eq!(first, second, "{text}");
    assert_eq!(print_program(&second), printed);
}

#[test]
fn corpus_is_large_enough() {
    assert!(HANDWRITTEN.len() + sequence_corpus().len() >= 20);
}

#[test]
fn handwritten_programs_round_trip() {
    for text in HANDWRITTEN {
        assert_fixed_point(text);
        parse_program(text, &sys()).unwrap_or_else(|e| panic!("{e}\n{text}"));
    }
}

#[test]
fn generated_programs_round_trip_and_keep_their_unitary() {
    let sys = sys();
    let sim = Simulator::ideal(&sys).unwrap();
    for seq in sequence_corpus() {
        let text = print_program(&sequence_to_program(&seq, &sys, Some("molecule.cfg")));
        assert_fixed_point(&text);
        let back = parse_program(&text, &sys).unwrap().sequence;
        let d = sim.unitary(&back).unwrap().max_abs_diff(&sim.unitary(&seq).unwrap());
        assert!(d < 1e-12, "{}: {d:e}", seq.name);
    }
}

#[test]
fn labeling_program_text() {
    let text = print_program(&sequence_to_program(&labeling_sequence(&sys()).unwrap(), &sys(), None));
    assert!(text.starts_with("frame resonant\npulse A y-90\ndelay "), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("pulse")).count(), 4);
}

fn spin() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["A", "B", "C"]).prop_map(String::from)
}

fn spins() -> impl Strategy<Value = Vec<String>> {
    prop::sample::subsequence(vec!["A", "B", "C"], 1..=3)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn number() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..1.0e3, (0u32..400).prop_map(f64::from), Just(0.5e-3)]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![number().prop_map(Expr::Num), (spin(), spin()).prop_map(|(a, b)| Expr::Coupling(a, b))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (
                prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]),
                inner.clone(),
                inner
            )
                .prop_map(|(op, l, r)| Expr::Binary(op, Box::new(l), Box::new(r))),
        ]
    })
}

fn angle() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::sample::select(vec![90.0, -90.0, 180.0, -180.0, 45.0, 360.0]),
        (0.001f64..360.0, any::<bool>()).prop_map(|(d, neg)| if neg { -d } else { d }),
    ]
}

fn pulse() -> impl Strategy<Value = Statement> {
    (spins(), prop::collection::vec((any::<bool>(), angle()), 3), any::<bool>()).prop_map(|(spins, rots, shared)| {
        Statement::Pulse(
            spins
                .into_iter()
                .zip(rots)
                .map(|(spin, (x, degrees))| PulseTarget { spin, axis: if x { PulseAxis::X } else { PulseAxis::Y }, degrees })
                .collect::<Vec<_>>(),
        )
        .with_shared(shared)
    })
}

trait Shared {
    fn with_shared(self, shared: bool) -> Self;
}

impl Shared for Statement {
    fn with_shared(self, shared: bool) -> Self {
        match self {
            Statement::Pulse(mut t) if shared => {
                let (axis, degrees) = (t[0].axis, t[0].degrees);
                for p in &mut t {
                    p.axis = axis;
                    p.degrees = degrees;
                }
                Statement::Pulse(t)
            }
            other => other,
        }
    }
}

fn statement() -> impl Strategy<Value = Statement> {
    prop_oneof![
        "[a-z][a-z0-9_./-]{0,12}".prop_map(Statement::System),
        pulse(),
        expr().prop_map(Statement::Delay),
        Just(Statement::Frame(FrameDecl::Resonant)),
        spin().prop_map(|s| Statement::Frame(FrameDecl::Uncouple(s))),
        (spins(), prop::collection::vec(-5.0e3f64..5.0e3, 3)).prop_map(|(s, hz)| {
            Statement::Frame(FrameDecl::Offsets(s.into_iter().zip(hz).collect()))
        }),
        (spins(), expr(), expr()).prop_map(|(spins, duration, dt)| Statement::Acquire { spins, duration, dt }),
    ]
}

proptest! {
    #[test]
    fn print_parse_is_identity(statements in prop::collection::vec(statement(), 0..12)) {
        let program = Program { statements };
        let text = print_program(&program);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &program);
        prop_assert_eq!(print_program(&back), text);
    }
}
