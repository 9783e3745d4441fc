#include <doctest.h>

#include <cmath>
#include <vector>

#include "bsr/errors.hpp"
#include "bsr/mixed_model.hpp"
#include "bsr/param_jump.hpp"
#include "bsr/prior.hpp"
#include "bsr/rng.hpp"
#include "test_util.hpp"

using namespace bsr;

namespace {

constexpr double kPi = 3.14159265358979323846;

ExprTree tree_of(ExprNode node) {
  ExprTree t;
  t.root = std::move(node);
  return t;
}

double log_ig(double x, double nu, double lambda) {
  return log_inverse_gamma_pdf(x, nu / 2.0, nu * lambda / 2.0);
}

double log_pair(const LtPair& u, double mean_a, double sa2, double sb2) {
  return log_normal_pdf(u.a, mean_a, std::sqrt(sa2)) +
         log_normal_pdf(u.b, 0.0, std::sqrt(sb2));
}

}  // namespace

TEST_CASE("coefficients extract and apply in pre-order") {
  // lt( add( lt(x1), x2 ) ): two parameterized nodes, outer first
  ExprTree tree = tree_of(make_lt(
      2.0, 3.0,
      make_binary(builtin_operator("add"), make_lt(4.0, 5.0, make_terminal(0)),
                  make_terminal(1))));
  ParamVector params = extract_params(tree.root);
  REQUIRE(params.size() == 2);
  CHECK(params.pairs[0].a == 2.0);
  CHECK(params.pairs[0].b == 3.0);
  CHECK(params.pairs[1].a == 4.0);
  CHECK(params.pairs[1].b == 5.0);

  params.pairs[1] = {7.0, 8.0};
  apply_params(tree.root, params);
  CHECK(tree.root.children[0].children[0].a == 7.0);
  CHECK(tree.root.children[0].children[0].b == 8.0);

  params.pairs.pop_back();
  CHECK_THROWS_AS(apply_params(tree.root, params), DimensionError);
}

TEST_CASE("uid matching classifies kept, dropped and created nodes") {
  ExprTree old_tree = tree_of(make_binary(builtin_operator("add"),
                                          make_lt(1.0, 0.0, make_terminal(0)),
                                          make_lt(2.0, 0.0, make_terminal(1))));
  // keep the first transform, replace the second subtree by a fresh one
  ExprTree new_tree = old_tree;
  new_tree.root.children[1] = make_lt(9.0, 9.0, make_terminal(1));

  const LtPairing pairing = pair_lt_nodes(old_tree.root, new_tree.root);
  REQUIRE(pairing.kept.size() == 1);
  CHECK((pairing.kept[0] == std::pair<int, int>(0, 0)));
  CHECK(pairing.dropped == std::vector<int>{1});
  CHECK(pairing.created == std::vector<int>{1});

  // trees that share a node uid twice are rejected
  ExprTree twin = old_tree;
  twin.root.children[1] = twin.root.children[0];
  CHECK_THROWS_AS((void)pair_lt_nodes(twin.root, new_tree.root), DimensionError);
}

TEST_CASE("deterministic halves of the dimension maps") {
  const std::vector<double> theta{0.8, -1.2};
  const std::vector<double> u{0.4, 0.6};
  std::vector<double> ts(2), us(2);
  expand_map(theta, u, ts, us);
  CHECK(ts[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(ts[1] == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(us[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(us[1] == doctest::Approx(-0.9).epsilon(1e-15));

  // shrink_map inverts expand_map exactly
  std::vector<double> back_t(2), back_u(2);
  shrink_map(ts, us, back_t, back_u);
  CHECK(back_t[0] == doctest::Approx(theta[0]).epsilon(1e-14));
  CHECK(back_t[1] == doctest::Approx(theta[1]).epsilon(1e-14));
  CHECK(back_u[0] == doctest::Approx(u[0]).epsilon(1e-14));
  CHECK(back_u[1] == doctest::Approx(u[1]).epsilon(1e-14));

  std::vector<double> wrong(3);
  CHECK_THROWS_AS(expand_map(theta, u, wrong, us), DimensionError);

  CHECK(expand_log_jacobian(4) == doctest::Approx(-4 * std::log(2.0)));
  CHECK(shrink_log_jacobian(4) == doctest::Approx(4 * std::log(2.0)));
}

TEST_CASE("map Jacobians agree with numeric differentiation") {
  for (const std::size_t n : {1u, 2u, 3u}) {
    // z = [theta; u] -> [theta_star; u_star]
    const auto expand_fn = [n](const std::vector<double>& z) {
      std::vector<double> out(2 * n);
      std::span<const double> theta(z.data(), n), u(z.data() + n, n);
      std::span<double> ts(out.data(), n), us(out.data() + n, n);
      expand_map(theta, u, ts, us);
      return out;
    };
    const auto shrink_fn = [n](const std::vector<double>& z) {
      std::vector<double> out(2 * n);
      std::span<const double> theta(z.data(), n), u(z.data() + n, n);
      std::span<double> ts(out.data(), n), us(out.data() + n, n);
      shrink_map(theta, u, ts, us);
      return out;
    };
    std::vector<double> z(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) z[i] = 0.3 * (i + 1);
    CHECK(testutil::rel_close(testutil::numeric_log_jacobian(expand_fn, z),
                              expand_log_jacobian(n), 1e-6));
    CHECK(testutil::rel_close(testutil::numeric_log_jacobian(shrink_fn, z),
                              shrink_log_jacobian(n), 1e-6));
  }
}

TEST_CASE("dimension-raising proposals account for every density term") {
  PriorConfig cfg = PriorConfig::defaults(2);
  ScaleState current{0.8, 1.3, 2.0};

  ParamVector theta;
  theta.pairs = {{0.9, 0.1}, {1.4, -0.2}};
  LtPairing pairing;
  pairing.kept = {{0, 1}};
  pairing.dropped = {1};
  pairing.created = {0, 2};  // slot 0 borrows the dropped pair, slot 2 is fresh

  Rng rng(101);
  const JumpResult jump = expand(theta, pairing, cfg, current, rng);
  REQUIRE(jump.new_params.size() == 3);
  CHECK(jump.new_scales.sigma2 == current.sigma2);
  CHECK(jump.new_scales.sigma_a2 > 0.0);
  CHECK(jump.log_jacobian == doctest::Approx(-4 * std::log(2.0)));

  // reconstruct the auxiliaries: kept and borrowed slots hold (theta + u)/2
  const LtPair t_kept = jump.new_params.pairs[1];
  const LtPair t_borrowed = jump.new_params.pairs[0];
  const LtPair u0{2 * t_kept.a - theta.pairs[0].a, 2 * t_kept.b - theta.pairs[0].b};
  const LtPair u1{2 * t_borrowed.a - theta.pairs[1].a,
                  2 * t_borrowed.b - theta.pairs[1].b};
  const LtPair fresh = jump.new_params.pairs[2];

  const double sa = jump.new_scales.sigma_a2;
  const double sb = jump.new_scales.sigma_b2;
  const double expect_forward =
      log_ig(sa, cfg.nu_a, cfg.lambda_a) + log_ig(sb, cfg.nu_b, cfg.lambda_b) +
      log_pair(u0, 1.0, sa, sb) + log_pair(u1, 1.0, sa, sb) +
      log_pair(fresh, 1.0, sa, sb);
  CHECK(jump.log_h_forward == doctest::Approx(expect_forward).epsilon(1e-12));

  // the reverse shrink's auxiliaries are theta - theta_star, mean zero at
  // the current scales
  const LtPair r0{theta.pairs[0].a - t_kept.a, theta.pairs[0].b - t_kept.b};
  const LtPair r1{theta.pairs[1].a - t_borrowed.a,
                  theta.pairs[1].b - t_borrowed.b};
  const double expect_reverse =
      log_ig(current.sigma_a2, cfg.nu_a, cfg.lambda_a) +
      log_ig(current.sigma_b2, cfg.nu_b, cfg.lambda_b) +
      log_pair(r0, 0.0, current.sigma_a2, current.sigma_b2) +
      log_pair(r1, 0.0, current.sigma_a2, current.sigma_b2);
  CHECK(jump.log_h_reverse == doctest::Approx(expect_reverse).epsilon(1e-12));

  // a net loss through this entry point is rejected
  LtPairing loss;
  loss.kept = {{0, 0}};
  loss.dropped = {1};
  loss.created = {};
  CHECK_THROWS_AS((void)expand(theta, loss, cfg, current, rng), DimensionError);
}

TEST_CASE("dimension-lowering proposals account for every density term") {
  PriorConfig cfg = PriorConfig::defaults(2);
  ScaleState current{0.8, 1.3, 2.0};

  ParamVector theta;
  theta.pairs = {{0.9, 0.1}, {1.4, -0.2}, {0.5, 0.7}};
  LtPairing pairing;
  pairing.kept = {{0, 0}};
  pairing.dropped = {1, 2};
  pairing.created = {1};  // borrows dropped[0]; dropped[1] is left over

  Rng rng(202);
  const JumpResult jump = shrink(theta, pairing, cfg, current, rng);
  REQUIRE(jump.new_params.size() == 2);
  CHECK(jump.log_jacobian == doctest::Approx(4 * std::log(2.0)));

  const LtPair theta0_0 = theta.pairs[0];
  const LtPair theta0_1 = theta.pairs[1];
  const LtPair u0{jump.new_params.pairs[0].a - theta0_0.a,
                  jump.new_params.pairs[0].b - theta0_0.b};
  const LtPair u1{jump.new_params.pairs[1].a - theta0_1.a,
                  jump.new_params.pairs[1].b - theta0_1.b};

  const double sa = jump.new_scales.sigma_a2;
  const double sb = jump.new_scales.sigma_b2;
  const double expect_forward =
      log_ig(sa, cfg.nu_a, cfg.lambda_a) + log_ig(sb, cfg.nu_b, cfg.lambda_b) +
      log_pair(u0, 0.0, sa, sb) + log_pair(u1, 0.0, sa, sb);
  CHECK(jump.log_h_forward == doctest::Approx(expect_forward).epsilon(1e-12));

  const LtPair r0{theta0_0.a - u0.a, theta0_0.b - u0.b};
  const LtPair r1{theta0_1.a - u1.a, theta0_1.b - u1.b};
  const double expect_reverse =
      log_ig(current.sigma_a2, cfg.nu_a, cfg.lambda_a) +
      log_ig(current.sigma_b2, cfg.nu_b, cfg.lambda_b) +
      log_pair(r0, 1.0, current.sigma_a2, current.sigma_b2) +
      log_pair(r1, 1.0, current.sigma_a2, current.sigma_b2) +
      log_pair(theta.pairs[2], 1.0, current.sigma_a2, current.sigma_b2);
  CHECK(jump.log_h_reverse == doctest::Approx(expect_reverse).epsilon(1e-12));

  LtPairing gain;
  gain.kept = {{0, 0}, {1, 1}, {2, 2}};
  gain.dropped = {};
  gain.created = {};
  CHECK_THROWS_AS((void)shrink(theta, gain, cfg, current, rng), DimensionError);
}

TEST_CASE("equal-dimension refresh densities cancel against the prior") {
  ParamVector params;
  params.pairs = {{1.5, -0.5}, {0.2, 0.3}};
  ScaleState scales{0.6, 1.1, 1.0};
  Rng rng(303);
  const NoChangeResult refresh = no_change_resample(params, scales, rng);
  REQUIRE(refresh.new_params.size() == 2);

  double expect_new = 0.0, expect_old = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    expect_new += log_pair(refresh.new_params.pairs[i], 1.0, scales.sigma_a2,
                           scales.sigma_b2);
    expect_old += log_pair(params.pairs[i], 1.0, scales.sigma_a2,
                           scales.sigma_b2);
  }
  CHECK(refresh.log_density_new == doctest::Approx(expect_new).epsilon(1e-12));
  CHECK(refresh.log_density_old == doctest::Approx(expect_old).epsilon(1e-12));

  // no parameterized nodes: an exact no-op
  const NoChangeResult empty =
      no_change_resample(ParamVector{}, scales, rng);
  CHECK(empty.new_params.size() == 0);
  CHECK(empty.log_density_new == 0.0);
  CHECK(empty.log_density_old == 0.0);
}

TEST_CASE("design matrix layout and failure modes") {
  const DataMatrix data = make_data({{1.0}, {2.0}}, {5.0, 7.0});
  std::vector<ExprTree> trees;
  trees.push_back(tree_of(make_terminal(0)));
  trees.push_back(tree_of(make_lt(2.0, 3.0, make_terminal(0))));

  const Eigen::MatrixXd design = design_matrix(trees, data);
  REQUIRE(design.rows() == 2);
  REQUIRE(design.cols() == 3);
  CHECK(design(0, 0) == 1.0);
  CHECK(design(1, 0) == 1.0);
  CHECK(design(0, 1) == 1.0);
  CHECK(design(1, 1) == 2.0);
  CHECK(design(0, 2) == 5.0);
  CHECK(design(1, 2) == 7.0);

  std::vector<ExprTree> bad;
  bad.push_back(tree_of(make_unary(builtin_operator("inv"), make_terminal(0))));
  const DataMatrix zero = make_data({{0.0}}, {1.0});
  CHECK_THROWS_AS((void)design_matrix(bad, zero), NonFiniteColumn);
  CHECK(!try_fit_mixture(bad, zero).has_value());
}

TEST_CASE("least squares: exact fit and oracle agreement") {
  // y = 3 + 2x on x = 2, 3: beta = (3, 2)... solved through the mixture
  const DataMatrix data = make_data({{2.0}, {3.0}}, {7.0, 9.0});
  std::vector<ExprTree> trees;
  trees.push_back(tree_of(make_terminal(0)));
  const OlsFit fit = ols_fit(design_matrix(trees, data), data.y);
  CHECK(fit.beta(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.beta(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.rss == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  // random well-conditioned problems against the normal-equations oracle
  Rng rng(404);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 40, p = 4;
    testutil::Matrix rows(n, std::vector<double>(p));
    std::vector<double> y(n);
    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd ey(n);
    for (int r = 0; r < n; ++r) {
      rows[r][0] = 1.0;
      for (int c = 1; c < p; ++c) rows[r][c] = rng.normal(0.0, 2.0);
      y[r] = rng.normal(0.0, 1.0);
      for (int c = 0; c < p; ++c) design(r, c) = rows[r][c];
      ey(r) = y[r];
    }
    const OlsFit mine = ols_fit(design, ey);
    const testutil::OlsOracle oracle = testutil::ols_normal_equations(rows, y);
    for (int c = 0; c < p; ++c)
      CHECK(testutil::rel_close(mine.beta(c), oracle.beta[c], 1e-8));
    CHECK(testutil::rel_close(mine.rss, oracle.rss, 1e-8));
  }

  // rank-deficient designs are handled, not fatal
  Eigen::MatrixXd flat(3, 2);
  flat << 1, 2, 1, 2, 1, 2;
  Eigen::VectorXd fy(3);
  fy << 1, 2, 3;
  const OlsFit degenerate = ols_fit(flat, fy);
  CHECK(std::isfinite(degenerate.rss));
}

TEST_CASE("log likelihood oracle values") {
  // rss = 0, n = 1, sigma2 = 1/(2 pi): the density is exactly 1
  CHECK(log_likelihood(0.0, 1, 1.0 / (2 * kPi)) ==
        doctest::Approx(0.0).scale(1).epsilon(1e-14));
  // rss = 2, n = 2, sigma2 = 1
  CHECK(log_likelihood(2.0, 2, 1.0) ==
        doctest::Approx(-std::log(2 * kPi) - 1.0).epsilon(1e-14));
  CHECK(log_likelihood(std::numeric_limits<double>::infinity(), 3, 1.0) ==
        -std::numeric_limits<double>::infinity());
  CHECK(log_likelihood(std::numeric_limits<double>::quiet_NaN(), 3, 1.0) ==
        -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS((void)log_likelihood(1.0, 2, 0.0), NonPositiveVariance);
}

TEST_CASE("prediction, error metrics and rendering") {
  MixtureModel model;
  model.trees.push_back(tree_of(make_terminal(0)));
  model.trees.push_back(tree_of(make_unary(builtin_operator("exp"),
                                           make_terminal(0))));
  model.beta = {1.0, 2.0, 0.5};
  const DataMatrix data = make_data({{0.0}, {1.0}}, {0.0, 0.0});
  const std::vector<double> pred = predict(model, data);
  REQUIRE(pred.size() == 2);
  CHECK(pred[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(pred[1] == doctest::Approx(3.0 + 0.5 * std::exp(1.0)).epsilon(1e-15));

  CHECK(rmse(std::vector<double>{3.0, 0.0}, std::vector<double>{1.0, 2.0}) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)rmse(std::vector<double>{1.0}, std::vector<double>{}),
                  LengthMismatch);

  // zero counts as positive on both sides
  CHECK(sign_accuracy(std::vector<double>{1.0, -1.0, 0.0, 2.0},
                      std::vector<double>{0.5, 1.0, 1.0, -0.1}) ==
        doctest::Approx(0.5).epsilon(1e-15));

  MixtureModel tiny;
  tiny.trees.push_back(tree_of(make_terminal(0)));
  tiny.beta = {1.5, -2.0};
  CHECK(format_mixture(tiny, 4) == "1.5 - 2.0*x1");
}
