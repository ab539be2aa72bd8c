use macurv::geometry::ConvexDomain;
use macurv::solver::{analytic_ball, analytic_ellipsoid, solve_dirichlet, SolverOptions};
use macurv::Grid;

#[test]
#[ignore]
fn probe_ratios() {
    let cases: Vec<(&str, ConvexDomain, macurv::AnalyticSolution)> = vec![
        (
            "disk",
            ConvexDomain::ball(vec![0.0, 0.0], 1.0).unwrap(),
            analytic_ball(vec![0.0, 0.0], 1.0),
        ),
        (
            "ellipse",
            ConvexDomain::ellipsoid(vec![0.0, 0.0], vec![1.0 / 2.0f64.sqrt(), 2.0f64.sqrt()])
                .unwrap(),
            analytic_ellipsoid(vec![0.0, 0.0], vec![2.0, 0.5], 1.0).unwrap(),
        ),
    ];
    for (name, domain, exact) in cases {
        let mut prev: Option<f64> = None;
        for nodes in [33usize, 65, 129] {
            let grid = Grid::from_domain(&domain, nodes).unwrap();
            let res = solve_dirichlet(&domain, &grid, &SolverOptions::default()).unwrap();
            let mut err = 0.0f64;
            for idx in grid.non_exterior_nodes() {
                err = err.max((res.u.get(idx) - exact.eval(&grid.node_pos(idx))).abs());
            }
            let ratio = prev.map(|p| p / err).unwrap_or(f64::NAN);
            println!(
                "{name} {nodes:4} iters {:2} err {err:.3e} ratio {ratio:.2}",
                res.newton_iterations
            );
            prev = Some(err);
        }
    }
}
