struct SuiteEntry {
    label: &'static str,
    spec: GameSpec,
    /// (side, the strategy whose lemma bound is certified)
    checks: Vec<(Side, StrategyKind)>,
}

/// Standard certification suite. Instances live at a small scale (domain
/// radius SCALE) so the pinned 1e-3 sup-norm corruption is material relative
/// to each lemma's slack; the certificates themselves are scale-invariant.
const CERT_SCALE: f64 = 1e-3;

fn certification_suite(seed: u64) -> Vec<SuiteEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 3;
    // quadratic with the minimizer inside the scaled ball
    let eigs = fgnrd::linalg::log_spaced_eigs(dim, 0.125, 1.0);
    let a = fgnrd::linalg::spd_with_spectrum(&eigs, &mut rng);
    // minimizer outside the scaled domain keeps the dual actions bounded
    // away from zero, which is what gives the 1e-3 corruption its leverage
    let x_target = {
        let raw = Point::from(&(0..dim).map(|_| rng.gen_range(0.4..1.0)).collect::<Vec<_>>());
        raw.scale(2.5 * CERT_SCALE / raw.norm())
    };
    let b = a.matvec(&x_target);
    let quad = Arc::new(Problem::quadratic(a, b, 1.0, 0.125).unwrap());
    let l = quad.smoothness().unwrap();
    let boxd = Domain::symmetric_box(dim, CERT_SCALE);
    let ball = Domain::L2Ball { radius: CERT_SCALE, dim };
    let w0 = Point::from(&[0.4, -0.3, 0.2]).scale(CERT_SCALE);
    let rounds = 25;

    let mut entries = Vec::new();

    // conditional-gradient dynamic: FTL (y) vs BR (x); linear weights make
    // the corruption's regret grow quadratically against a linearly growing
    // lemma bound
    entries.push(SuiteEntry {
        label: "ftl+br",
        spec: GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Linear,
            rounds: 300,
            problem: quad.clone(),
            domain: boxd.clone(),
            y_strategy: StrategyKind::Ftl { init: w0.clone() },
            x_strategy: StrategyKind::BestResponse,
        },
        checks: vec![
            (Side::YPlayer, StrategyKind::Ftl { init: w0.clone() }),
            (Side::XPlayer, StrategyKind::BestResponse),
        ],
    });

    // cumulative descent dynamic: OMD (x) vs BTL (y); the longer horizon and
    // larger step keep the divergence term small relative to the corruption
    let gamma = 1.0;
    entries.push(SuiteEntry {
        label: "omd+btl",
        spec: GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds: 300,
            problem: quad.clone(),
            domain: boxd.clone(),
            y_strategy: StrategyKind::Btl,
            x_strategy: StrategyKind::Omd {
                dgf: DistanceGenerator::SquaredL2,
                gamma,
                init: w0.clone(),
            },
        },
        checks: vec![
            (
                Side::XPlayer,
                StrategyKind::Omd {
                    dgf: DistanceGenerator::SquaredL2,
                    gamma,
                    init: w0.clone(),
                },
            ),
            (Side::YPlayer, StrategyKind::Btl),
        ],
    });

    // momentum dynamic over the box: FTL (y) vs MD (x)
    let gamma_md = 1.0 / (8.0 * l);
    entries.push(SuiteEntry {
        label: "ftl+md",
        spec: GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Linear,
            rounds,
            problem: quad.clone(),
            domain: boxd.clone(),
            y_strategy: StrategyKind::Ftl { init: w0.clone() },
            x_strategy: StrategyKind::Md {
                dgf: DistanceGenerator::SquaredL2,
                gamma: gamma_md,
                init: w0.clone(),
            },
        },
        checks: vec![(
            Side::XPlayer,
            StrategyKind::Md {
                dgf: DistanceGenerator::SquaredL2,
                gamma: gamma_md,
                init: w0.clone(),
            },
        )],
    });

    // extra-gradient dynamic over the ball: OPTMD (x) vs BR (y)
    let gamma_opt = 1.0;
    entries.push(SuiteEntry {
        label: "optmd+br",
        spec: GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds: 300,
            problem: quad.clone(),
            domain: ball.clone(),
            y_strategy: StrategyKind::BestResponse,
            x_strategy: StrategyKind::OptimisticMd {
                dgf: DistanceGenerator::SquaredL2,
                gamma: gamma_opt,
                init: w0.clone(),
            },
        },
        checks: vec![(
            Side::XPlayer,
            StrategyKind::OptimisticMd {
                dgf: DistanceGenerator::SquaredL2,
                gamma: gamma_opt,
                init: w0.clone(),
            },
        )],
    });

    // dual-averaging dynamic: OFTL (y) vs BTRL (x)
    let eta = 1.0 / (4.0 * l);
    entries.push(SuiteEntry {
        label: "oftl+btrl",
        spec: GameSpec {
            payoff: Payoff::Plain,
            order: Order::YFirst,
            weights: WeightSchedule::Linear,
            rounds,
            problem: quad.clone(),
            domain: ball.clone(),
            y_strategy: StrategyKind::Oftl { init: w0.clone() },
            x_strategy: StrategyKind::Btrl { reg: RegSpec::SquaredL2, eta },
        },
        checks: vec![
            (Side::YPlayer, StrategyKind::Oftl { init: w0.clone() }),
            (Side::XPlayer, StrategyKind::Btrl { reg: RegSpec::SquaredL2, eta }),
        ],
    });

    // regularized-leader first mover: FTRL (x) vs BR (y). The lemma's
    // quadratic gradient term dominates its slack, so this entry lives at a
    // scale where gradient norms sit below half the corruption magnitude.
    let ftrl_scale = 2e-4;
    let x_target_s = x_target.scale(ftrl_scale / CERT_SCALE);
    let quad_small = {
        let eigs = fgnrd::linalg::log_spaced_eigs(dim, 0.125, 1.0);
        let a2 = fgnrd::linalg::spd_with_spectrum(&eigs, &mut rng);
        let b2 = a2.matvec(&x_target_s);
        Arc::new(Problem::quadratic(a2, b2, 1.0, 0.125).unwrap())
    };
    entries.push(SuiteEntry {
        label: "ftrl+br",
        spec: GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds,
            problem: quad_small,
            domain: Domain::L2Ball { radius: ftrl_scale, dim },
            y_strategy: StrategyKind::BestResponse,
            x_strategy: StrategyKind::Ftrl { reg: RegSpec::SquaredL2, eta: 3.0 },
        },
        checks: vec![(Side::XPlayer, StrategyKind::Ftrl { reg: RegSpec::SquaredL2, eta: 3.0 })],
    });

    // boundary dynamic on a linear objective (constant nonvanishing
    // subgradients): FTL (x) over the strongly convex ball vs BR (y)
    let azero = fgnrd::linalg::SpdMatrix::new(Matrix::zeros(dim, dim)).unwrap();
    let blin = Point::from(&(0..dim).map(|_| rng.gen_range(0.3..1.0)).collect::<Vec<_>>());
    let x_lin = blin.scale(CERT_SCALE / blin.norm());
    let f_lin = -CERT_SCALE * blin.norm();
    let linear = Arc::new(
        Problem::quadratic(azero, blin, 0.0, 0.0).unwrap().with_known_min(x_lin, f_lin),
    );
    let mut z0 = vec![0.0; dim];
    z0[0] = -CERT_SCALE;
    entries.push(SuiteEntry {
        label: "boundary ftl+br",
        spec: GameSpec {
            payoff: Payoff::Plain,
            order: Order::XFirst,
            weights: WeightSchedule::Uniform,
            rounds,
            problem: linear,
            domain: ball.clone(),
            y_strategy: StrategyKind::BestResponse,
            x_strategy: StrategyKind::Ftl { init: Point::from(&z0) },
        },
        checks: vec![(Side::XPlayer, StrategyKind::Ftl { init: Point::from(&z0) })],
    });

    entries
}

